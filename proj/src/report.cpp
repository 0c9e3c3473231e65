#include "report.hpp"

#include <cmath>

#include "errors.hpp"
#include "stats.hpp"

namespace fv {

const char* to_string(VarianceMethod m) {
    switch (m) {
    case VarianceMethod::conservative_quarter:
        return "conservative_quarter";
    case VarianceMethod::bucket:
        return "bucket";
    case VarianceMethod::quasi_bucket:
        return "quasi_bucket";
    case VarianceMethod::supplied_true_p:
        return "supplied_true_p";
    }
    return "?";
}

EvalReport make_report(double estimate, double sigma_sq, double alpha, std::size_t n,
                       VarianceMethod method, std::string notes) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("alpha must lie in (0, 1)");
    if (n == 0)
        throw ValidationError("report over empty sample");
    if (sigma_sq < 0.0)
        sigma_sq = 0.0;
    EvalReport rep;
    rep.estimate = estimate;
    rep.std_error = std::sqrt(sigma_sq / static_cast<double>(n));
    double z = stats::normal_quantile(1.0 - alpha / 2.0);
    rep.ci_lo = estimate - z * rep.std_error;
    rep.ci_hi = estimate + z * rep.std_error;
    rep.alpha = alpha;
    rep.n = n;
    rep.variance_method = method;
    rep.notes = std::move(notes);
    return rep;
}

} // namespace fv
