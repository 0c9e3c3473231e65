#include "losses.hpp"

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace fv {

namespace {

void require_probability(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw DomainError(std::string(what) + " must lie in [0, 1]");
}

bool log_type(LossKind kind) {
    return kind == LossKind::kullback_leibler || kind == LossKind::log_score;
}

} // namespace

LossSpec LossSpec::squared_error() {
    return LossSpec(LossKind::squared_error, "squared_error", 0.0);
}

LossSpec LossSpec::kullback_leibler(double clip_epsilon) {
    LossSpec l(LossKind::kullback_leibler, "kullback_leibler", clip_epsilon);
    if (!(clip_epsilon >= 0.0 && clip_epsilon < 0.5))
        throw ValidationError("clip_epsilon must lie in [0, 0.5)");
    return l;
}

LossSpec LossSpec::log_score(double clip_epsilon) {
    LossSpec l(LossKind::log_score, "log_score", clip_epsilon);
    if (!(clip_epsilon >= 0.0 && clip_epsilon < 0.5))
        throw ValidationError("clip_epsilon must lie in [0, 0.5)");
    return l;
}

LossSpec LossSpec::absolute() { return LossSpec(LossKind::absolute, "absolute", 0.0); }

LossSpec LossSpec::custom(ScalarFn loss_on_event, ScalarFn loss_on_nonevent) {
    if (!loss_on_event || !loss_on_nonevent)
        throw ValidationError("custom loss needs both L(1, .) and L(0, .)");
    LossSpec l(LossKind::custom, "custom", 0.0);
    l.custom_event_ = std::move(loss_on_event);
    l.custom_nonevent_ = std::move(loss_on_nonevent);
    return l;
}

LossSpec LossSpec::from_name(std::string_view name, double clip_epsilon) {
    if (name == "brier" || name == "squared_error")
        return squared_error();
    if (name == "kl" || name == "kullback_leibler")
        return kullback_leibler(clip_epsilon);
    if (name == "log" || name == "log_score")
        return log_score(clip_epsilon);
    if (name == "absolute")
        return absolute();
    throw ValidationError("unknown loss name: " + std::string(name));
}

double LossSpec::admissible_forecast(double p_hat) const {
    require_probability(p_hat, "forecast");
    if (!log_type(kind_))
        return p_hat;
    if (clip_epsilon_ > 0.0) {
        if (p_hat < clip_epsilon_)
            return clip_epsilon_;
        if (p_hat > 1.0 - clip_epsilon_)
            return 1.0 - clip_epsilon_;
        return p_hat;
    }
    if (p_hat == 0.0 || p_hat == 1.0)
        throw DomainError("log-type loss undefined at forecast " +
                          std::to_string(p_hat) + " with clip_epsilon = 0");
    return p_hat;
}

double LossSpec::loss_on_event(double p_hat) const {
    double ph = admissible_forecast(p_hat);
    switch (kind_) {
    case LossKind::squared_error:
        return (1.0 - ph) * (1.0 - ph);
    case LossKind::kullback_leibler:
    case LossKind::log_score:
        return -std::log(ph);
    case LossKind::absolute:
        return 1.0 - ph;
    case LossKind::custom:
        return custom_event_(ph);
    }
    throw ValidationError("unreachable loss kind");
}

double LossSpec::loss_on_nonevent(double p_hat) const {
    double ph = admissible_forecast(p_hat);
    switch (kind_) {
    case LossKind::squared_error:
        return ph * ph;
    case LossKind::kullback_leibler:
    case LossKind::log_score:
        return -std::log(1.0 - ph);
    case LossKind::absolute:
        return ph;
    case LossKind::custom:
        return custom_nonevent_(ph);
    }
    throw ValidationError("unreachable loss kind");
}

double eval_loss(const LossSpec& loss, double p, double p_hat) {
    require_probability(p, "probability");
    switch (loss.kind()) {
    case LossKind::squared_error: {
        require_probability(p_hat, "forecast");
        double d = p - p_hat;
        return d * d;
    }
    case LossKind::kullback_leibler: {
        double ph = loss.admissible_forecast(p_hat);
        // 0 * log 0 = 0 convention on both terms.
        double v = 0.0;
        if (p > 0.0)
            v += p * std::log(p / ph);
        if (p < 1.0)
            v += (1.0 - p) * std::log((1.0 - p) / (1.0 - ph));
        return v;
    }
    case LossKind::log_score: {
        double ph = loss.admissible_forecast(p_hat);
        return -(p * std::log(ph) + (1.0 - p) * std::log(1.0 - ph));
    }
    case LossKind::absolute:
        require_probability(p_hat, "forecast");
        return std::fabs(p - p_hat);
    case LossKind::custom:
        // Custom losses are defined by their values on {0, 1}; in between we
        // use the induced linear form.
        return p * loss.loss_on_event(p_hat) + (1.0 - p) * loss.loss_on_nonevent(p_hat);
    }
    throw ValidationError("unreachable loss kind");
}

double score(const LossSpec& loss, double y, double p_hat) {
    if (y != 0.0 && y != 1.0)
        throw ValidationError("score requires a binary outcome");
    return y == 1.0 ? loss.loss_on_event(p_hat) : loss.loss_on_nonevent(p_hat);
}

LinearCoeffs linear_coeffs(const LossSpec& loss, double p_hat) {
    double l1 = loss.loss_on_event(p_hat);
    double l0 = loss.loss_on_nonevent(p_hat);
    return LinearCoeffs{l1 - l0, l0};
}

double linear_equivalent_value(const LossSpec& loss, double p, double p_hat) {
    require_probability(p, "probability");
    LinearCoeffs c = linear_coeffs(loss, p_hat);
    return c.a * p + c.b;
}

ProprietyResult check_propriety(const LossSpec& loss, double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 0.1))
        throw ValidationError("grid_step must lie in (0, 0.1]");
    const double tol = 1e-12;

    std::vector<double> grid;
    for (int i = 1;; ++i) {
        double v = grid_step * i;
        if (v >= 1.0 - tol)
            break;
        grid.push_back(v);
    }

    std::vector<LinearCoeffs> coeffs;
    coeffs.reserve(grid.size());
    for (double ph : grid)
        coeffs.push_back(linear_coeffs(loss, ph));

    bool strict = true;
    for (std::size_t ip = 0; ip < grid.size(); ++ip) {
        double p = grid[ip];
        double diag = coeffs[ip].a * p + coeffs[ip].b;
        for (std::size_t ih = 0; ih < grid.size(); ++ih) {
            if (ih == ip)
                continue;
            double v = coeffs[ih].a * p + coeffs[ih].b;
            if (diag > v + tol)
                return ProprietyResult{Propriety::improper,
                                       std::make_pair(p, grid[ih])};
            if (v <= diag + tol)
                strict = false; // tie: minimum not uniquely at p_hat = p
        }
    }
    return ProprietyResult{strict ? Propriety::strictly_proper : Propriety::proper,
                           std::nullopt};
}

const char* to_string(Propriety p) {
    switch (p) {
    case Propriety::proper:
        return "proper";
    case Propriety::strictly_proper:
        return "strictly_proper";
    case Propriety::improper:
        return "improper";
    }
    return "?";
}

} // namespace fv
