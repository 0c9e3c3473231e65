#include "inference.hpp"

#include <cmath>

#include "buckets.hpp"
#include "errors.hpp"
#include "stats.hpp"

namespace fv {

namespace {

void require_binary(const Panel& panel, const char* op) {
    if (panel.mode() != PanelMode::binary)
        throw ValidationError(std::string(op) + " requires a binary panel");
}

void require_nonempty(const Panel& panel) {
    if (panel.size() == 0)
        throw ValidationError("operation over empty panel");
}

std::string cell_name(const BucketCell& cell) {
    return "(t=" + std::to_string(cell.t) + ", bucket=" + cell.label + ")";
}

} // namespace

std::vector<double> variance_proxies(const Panel& panel, const VarianceSource& source) {
    require_nonempty(panel);
    switch (source.method) {
    case VarianceMethod::conservative_quarter:
        return std::vector<double>(panel.size(), 0.25);
    case VarianceMethod::bucket: {
        if (!source.partition)
            throw MissingBucketError("bucket variance requested without a partition");
        return cell_variance_per_record(panel, *source.partition);
    }
    case VarianceMethod::quasi_bucket: {
        if (!source.partition)
            throw MissingBucketError("quasi-bucket variance requested without a partition");
        const BucketPartition& part = *source.partition;
        if (part.total() != panel.size())
            throw MissingBucketError("partition does not cover the panel");
        std::vector<double> out(panel.size(), 0.0);
        for (const auto& cell : part.cells()) {
            const std::size_t m = cell.indices.size();
            if (m < 2)
                throw CellTooSmallError("cell " + cell_name(cell) +
                                        " has size 1, needs >= 2");
            stats::KahanSum sum;
            for (std::uint32_t i : cell.indices)
                sum.add(panel[i].y);
            double ybar = sum.value() / static_cast<double>(m);
            double correction = static_cast<double>(m) / static_cast<double>(m - 1);
            for (std::uint32_t i : cell.indices) {
                double d = panel[i].y - ybar;
                out[i] = d * d * correction;
            }
        }
        return out;
    }
    case VarianceMethod::supplied_true_p: {
        if (!panel.all_have_true())
            throw MissingFieldError("supplied_true_p variance requires p_true on "
                                    "every record");
        std::vector<double> out;
        out.reserve(panel.size());
        for (const auto& r : panel.records())
            out.push_back(*r.p_true * (1.0 - *r.p_true));
        return out;
    }
    }
    throw ValidationError("unreachable variance method");
}

double average_score(const Panel& panel, const LossSpec& loss, ForecastField field) {
    require_binary(panel, "average_score");
    require_nonempty(panel);
    panel.require_field(field);
    stats::KahanSum sum;
    for (std::size_t i = 0; i < panel.size(); ++i)
        sum.add(score(loss, panel[i].y, panel.field(i, field)));
    return sum.value() / static_cast<double>(panel.size());
}

EvalReport ci_average_loss(const Panel& panel, const LossSpec& loss, double alpha,
                           const VarianceSource& source, ForecastField field) {
    require_binary(panel, "ci_average_loss");
    if (!loss.has_linear_equivalent())
        throw NoLinearEquivalentError(
            "loss '" + loss.name() +
            "' has no linear equivalent; no consistent average-loss target exists");
    double estimate = average_score(panel, loss, field);
    std::vector<double> w = variance_proxies(panel, source);
    stats::KahanSum sum;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        double a = linear_coeffs(loss, panel.field(i, field)).a;
        sum.add(a * a * w[i]);
    }
    double sigma_sq = sum.value() / static_cast<double>(panel.size());
    std::string notes = loss.linear_in_p()
                            ? "target: average loss against true probabilities "
                              "(loss linear in the outcome probability)"
                            : "target: average linear-equivalent loss";
    return make_report(estimate, sigma_sq, alpha, panel.size(), source.method,
                       std::move(notes));
}

EvalReport compare_forecasts(const Panel& panel, const LossSpec& loss, double alpha,
                             const VarianceSource& source, CompareMode mode) {
    require_binary(panel, "compare_forecasts");
    require_nonempty(panel);
    panel.require_field(ForecastField::p_hat_alt);
    if (mode == CompareMode::linear_equivalent && !loss.has_linear_equivalent())
        throw NoLinearEquivalentError(
            "loss '" + loss.name() + "' has no linear equivalent; use the general "
            "comparison mode, whose target is the delta-weighted probability form");

    std::vector<double> w = variance_proxies(panel, source);
    stats::KahanSum diff, var;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        double ph = panel[i].p_hat;
        double pa = panel.field(i, ForecastField::p_hat_alt);
        diff.add(score(loss, panel[i].y, ph) - score(loss, panel[i].y, pa));
        double delta = linear_coeffs(loss, ph).a - linear_coeffs(loss, pa).a;
        var.add(delta * delta * w[i]);
    }
    double estimate = diff.value() / static_cast<double>(panel.size());
    double s_sq = var.value() / static_cast<double>(panel.size());
    std::string notes =
        mode == CompareMode::linear_equivalent
            ? "target: average true-probability loss difference of the two forecasts"
            : "target: average of delta_i p_i + L(0, p_hat) - L(0, p_hat_alt) "
              "(no linear equivalent assumed)";
    return make_report(estimate, s_sq, alpha, panel.size(), source.method,
                       std::move(notes));
}

EvalReport compare_general_predictands(const Panel& panel, const LossSpec& loss,
                                       double alpha, const BucketPartition& part) {
    if (panel.mode() != PanelMode::general)
        throw ValidationError("compare_general_predictands requires a general-mode panel");
    require_nonempty(panel);
    panel.require_field(ForecastField::p_hat_alt);
    if (loss.kind() != LossKind::squared_error)
        throw NoLinearEquivalentError(
            "general-predictand comparison needs a loss linear in the outcome; "
            "squared_error is the supported choice");

    std::vector<double> v = cell_variance_per_record(panel, part);
    stats::KahanSum diff, var;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        double y = panel[i].y;
        double f1 = panel[i].p_hat;
        double f2 = panel.field(i, ForecastField::p_hat_alt);
        diff.add((y - f1) * (y - f1) - (y - f2) * (y - f2));
        double delta = -2.0 * (f1 - f2); // slope difference of the linear equivalents
        var.add(delta * delta * v[i]);
    }
    double estimate = diff.value() / static_cast<double>(panel.size());
    double s_sq = var.value() / static_cast<double>(panel.size());
    return make_report(estimate, s_sq, alpha, panel.size(), VarianceMethod::bucket,
                       "general-predictand score difference; bucket variance");
}

double skill_score(const Panel& panel, const LossSpec& loss) {
    require_binary(panel, "skill_score");
    double clim = average_score(panel, loss, ForecastField::p_clim);
    if (clim == 0.0)
        throw ZeroDenominatorError("climatology average score is zero");
    double fc = average_score(panel, loss, ForecastField::p_hat);
    return (clim - fc) / clim;
}

double winkler_weight(const LossSpec& loss, double p_hat, double p_clim) {
    if (p_hat >= p_clim)
        return loss.loss_on_event(p_hat) - loss.loss_on_event(p_clim);
    return loss.loss_on_nonevent(p_hat) - loss.loss_on_nonevent(p_clim);
}

WinklerResult winkler_score(const Panel& panel, const LossSpec& loss, double alpha,
                            const VarianceSource& source,
                            DegenerateWeightPolicy policy) {
    require_binary(panel, "winkler_score");
    require_nonempty(panel);
    panel.require_field(ForecastField::p_clim);
    if (!loss.has_linear_equivalent())
        throw NoLinearEquivalentError("Winkler's score needs a loss with a linear "
                                      "equivalent; '" + loss.name() + "' has none");

    std::vector<double> w = variance_proxies(panel, source);

    std::vector<std::string> degenerate;
    stats::KahanSum sum, var;
    std::size_t used = 0;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        const ForecastRecord& r = panel[i];
        double c = panel.field(i, ForecastField::p_clim);
        double l = winkler_weight(loss, r.p_hat, c);
        if (l == 0.0) {
            degenerate.push_back("(t=" + std::to_string(r.t) +
                                 ", k=" + std::to_string(r.k) + ")");
            continue;
        }
        double term = (score(loss, r.y, r.p_hat) - score(loss, r.y, c)) / l;
        sum.add(term);
        double delta = linear_coeffs(loss, r.p_hat).a - linear_coeffs(loss, c).a;
        var.add(delta * delta * w[i] / (l * l));
        ++used;
    }

    if (!degenerate.empty() && policy == DegenerateWeightPolicy::error) {
        std::string msg = "degenerate Winkler weight (forecast equals climatology) at:";
        for (std::size_t i = 0; i < degenerate.size() && i < 8; ++i)
            msg += " " + degenerate[i];
        if (degenerate.size() > 8)
            msg += " and " + std::to_string(degenerate.size() - 8) + " more";
        throw DegenerateWeightError(msg);
    }
    if (used == 0)
        throw SkippedAllError("all " + std::to_string(degenerate.size()) +
                              " records have degenerate Winkler weights");

    double estimate = sum.value() / static_cast<double>(used);
    double s_sq = var.value() / static_cast<double>(used);
    std::string notes = "Winkler score; targets the per-record weighted "
                        "true-probability loss improvement over climatology";
    if (!degenerate.empty())
        notes += "; skipped " + std::to_string(degenerate.size()) +
                 " records with degenerate weights";
    WinklerResult out;
    out.report = make_report(estimate, s_sq, alpha, used, source.method,
                             std::move(notes));
    out.skipped = degenerate.size();
    return out;
}

} // namespace fv
