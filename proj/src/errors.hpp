#ifndef FV_ERRORS_HPP
#define FV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fv {

// Exit-code families shared with the CLI: 1 = malformed input or settings,
// 2 = estimator preconditions not met by otherwise valid data.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message, int exit_code)
        : std::runtime_error(message), name_(std::move(name)), exit_code_(exit_code) {}

    const std::string& name() const noexcept { return name_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string name_;
    int exit_code_;
};

#define FV_ERROR_CLASS(NAME, EXIT_CODE)                                        \
    class NAME : public Error {                                                \
    public:                                                                    \
        explicit NAME(const std::string& message)                              \
            : Error(#NAME, message, EXIT_CODE) {}                              \
    }

FV_ERROR_CLASS(ParseError, 1);
FV_ERROR_CLASS(ValidationError, 1);
FV_ERROR_CLASS(DuplicateKeyError, 1);
FV_ERROR_CLASS(InvalidBinsError, 1);
FV_ERROR_CLASS(TooLargeError, 1);

FV_ERROR_CLASS(DomainError, 2);
FV_ERROR_CLASS(MissingLabelError, 2);
FV_ERROR_CLASS(MissingFieldError, 2);
FV_ERROR_CLASS(EmptyHistoryError, 2);
FV_ERROR_CLASS(NoLinearEquivalentError, 2);
FV_ERROR_CLASS(MissingBucketError, 2);
FV_ERROR_CLASS(CellTooSmallError, 2);
FV_ERROR_CLASS(ZeroDenominatorError, 2);
FV_ERROR_CLASS(DegenerateWeightError, 2);
FV_ERROR_CLASS(SkippedAllError, 2);
FV_ERROR_CLASS(NonConstantTruePError, 2);

#undef FV_ERROR_CLASS

} // namespace fv

#endif
