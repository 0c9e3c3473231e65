#ifndef FV_LOSSES_HPP
#define FV_LOSSES_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace fv {

enum class LossKind { squared_error, kullback_leibler, log_score, absolute, custom };

// Slope/intercept of the loss seen as a linear function of the outcome
// probability at a fixed forecast: value(p) = a * p + b.
struct LinearCoeffs {
    double a;
    double b;
};

// A binary-outcome loss. Everything the inference machinery needs is the
// pair of functions p_hat -> L(1, p_hat) and p_hat -> L(0, p_hat), which is
// also how custom losses are supplied.
class LossSpec {
public:
    using ScalarFn = std::function<double(double)>;

    static LossSpec squared_error();
    static LossSpec kullback_leibler(double clip_epsilon = 0.0);
    static LossSpec log_score(double clip_epsilon = 0.0);
    static LossSpec absolute();
    static LossSpec custom(ScalarFn loss_on_event, ScalarFn loss_on_nonevent);

    // Accepts "brier"/"squared_error", "kl"/"kullback_leibler",
    // "log"/"log_score", "absolute".
    static LossSpec from_name(std::string_view name, double clip_epsilon = 0.0);

    LossKind kind() const { return kind_; }
    double clip_epsilon() const { return clip_epsilon_; }
    const std::string& name() const { return name_; }

    bool has_linear_equivalent() const { return kind_ != LossKind::absolute; }
    // True when L(p, p_hat) itself is linear in p, so the plain average score
    // already targets the true-probability average loss.
    bool linear_in_p() const {
        return kind_ == LossKind::log_score || kind_ == LossKind::custom;
    }

    double loss_on_event(double p_hat) const;    // L(1, p_hat)
    double loss_on_nonevent(double p_hat) const; // L(0, p_hat)

    // Clamps p_hat into [eps, 1-eps] for log-type losses, or throws
    // DomainError at the boundary when no clipping was requested.
    double admissible_forecast(double p_hat) const;

private:
    LossSpec(LossKind kind, std::string name, double clip_epsilon)
        : kind_(kind), name_(std::move(name)), clip_epsilon_(clip_epsilon) {}

    LossKind kind_;
    std::string name_;
    double clip_epsilon_ = 0.0;
    ScalarFn custom_event_, custom_nonevent_;
};

double eval_loss(const LossSpec& loss, double p, double p_hat);
double score(const LossSpec& loss, double y, double p_hat);
LinearCoeffs linear_coeffs(const LossSpec& loss, double p_hat);
double linear_equivalent_value(const LossSpec& loss, double p, double p_hat);

enum class Propriety { proper, strictly_proper, improper };

struct ProprietyResult {
    Propriety classification;
    // For an improper rule, a grid pair (p, p_hat) with
    // value(p, p) > value(p, p_hat) + 1e-12.
    std::optional<std::pair<double, double>> witness;
};

ProprietyResult check_propriety(const LossSpec& loss, double grid_step = 0.01);

const char* to_string(Propriety p);

} // namespace fv

#endif
