#ifndef FV_REPORT_HPP
#define FV_REPORT_HPP

#include <cstddef>
#include <string>

namespace fv {

enum class VarianceMethod { conservative_quarter, bucket, quasi_bucket, supplied_true_p };

const char* to_string(VarianceMethod m);

// Every inferential output: point estimate, standard error of the estimate
// (sigma_hat / sqrt(n)), and the two-sided normal interval.
struct EvalReport {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double alpha = 0.05;
    std::size_t n = 0;
    VarianceMethod variance_method = VarianceMethod::conservative_quarter;
    std::string notes;
};

EvalReport make_report(double estimate, double sigma_sq, double alpha, std::size_t n,
                       VarianceMethod method, std::string notes);

} // namespace fv

#endif
