#include "buckets.hpp"

#include <cmath>

#include "errors.hpp"
#include "stats.hpp"

namespace fv {

namespace {

std::string cell_name(const BucketCell& cell) {
    return "(t=" + std::to_string(cell.t) + ", bucket=" + cell.label + ")";
}

void require_cell_size(const BucketCell& cell, std::size_t min_size) {
    if (cell.indices.size() < min_size)
        throw CellTooSmallError("cell " + cell_name(cell) + " has size " +
                                std::to_string(cell.indices.size()) + ", needs >= " +
                                std::to_string(min_size));
}

void require_cover(const Panel& panel, const BucketPartition& part) {
    if (part.total() != panel.size())
        throw MissingBucketError("partition covers " + std::to_string(part.total()) +
                                 " of " + std::to_string(panel.size()) + " records");
}

std::vector<double> cell_values(const Panel& panel, const BucketCell& cell) {
    std::vector<double> v;
    v.reserve(cell.indices.size());
    for (std::uint32_t i : cell.indices)
        v.push_back(panel[i].y);
    return v;
}

double mean_of(std::span<const double> values) {
    stats::KahanSum s;
    for (double v : values)
        s.add(v);
    return s.value() / static_cast<double>(values.size());
}

} // namespace

double sample_variance(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m < 2)
        throw CellTooSmallError("sample variance needs at least 2 values, got " +
                                std::to_string(m));
    double ybar = mean_of(values);
    stats::KahanSum s;
    for (double v : values)
        s.add((v - ybar) * (v - ybar));
    return s.value() / static_cast<double>(m - 1);
}

double bucket_variance(std::span<const double> values, bool binary) {
    const std::size_t m = values.size();
    if (m < 2)
        throw CellTooSmallError("bucket variance needs at least 2 values, got " +
                                std::to_string(m));
    if (!binary)
        return sample_variance(values);
    double ones = 0.0;
    for (double v : values) {
        if (v != 0.0 && v != 1.0)
            throw ValidationError("binary bucket variance on non 0/1 outcome");
        ones += v;
    }
    double md = static_cast<double>(m);
    double ybar = ones / md;
    return md * ybar * (1.0 - ybar) / (md - 1.0);
}

double third_moment_estimate(std::span<const double> values) {
    const std::size_t m = values.size();
    // The sum of cubed deviations is identically zero for m = 2, so no
    // unbiased estimate exists below m = 3.
    if (m < 3)
        throw CellTooSmallError("third-moment estimate needs at least 3 values");
    double md = static_cast<double>(m);
    double ybar = mean_of(values);
    stats::KahanSum s;
    for (double v : values) {
        double d = v - ybar;
        s.add(d * d * d);
    }
    // E[sum (y - ybar)^3] = (m-1)(m-2)/m * mu3, the k-statistic scaling.
    return md / ((md - 1.0) * (md - 2.0)) * s.value();
}

double jackknife_var_of_sample_variance(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m < 3)
        throw CellTooSmallError("jackknife variance needs at least 3 values, got " +
                                std::to_string(m));
    double md = static_cast<double>(m);
    double v_hat = sample_variance(values);
    stats::KahanSum dev_sq;
    for (std::size_t i = 0; i < m; ++i) {
        stats::KahanSum pair_sum; // sum over k != i of (x_i - x_k)^2 / 2
        for (std::size_t k = 0; k < m; ++k) {
            if (k == i)
                continue;
            double d = values[i] - values[k];
            pair_sum.add(0.5 * d * d);
        }
        double q = pair_sum.value() / (md - 1.0);
        dev_sq.add((q - v_hat) * (q - v_hat));
    }
    return 4.0 * (md - 1.0) / (md * (md - 2.0) * (md - 2.0)) * dev_sq.value();
}

std::vector<CellStats> bucket_stats(const Panel& panel, const BucketPartition& part) {
    std::vector<CellStats> out;
    out.reserve(part.cells().size());
    const bool binary = panel.mode() == PanelMode::binary;
    for (const auto& cell : part.cells()) {
        std::vector<double> values = cell_values(panel, cell);
        CellStats cs;
        cs.t = cell.t;
        cs.label = cell.label;
        cs.n = values.size();
        cs.y_bar = mean_of(values);
        if (values.size() >= 2)
            cs.v_hat = bucket_variance(values, binary);
        if (values.size() >= 3) {
            cs.m3_hat = third_moment_estimate(values);
            cs.jackknife = jackknife_var_of_sample_variance(values);
        }
        out.push_back(std::move(cs));
    }
    return out;
}

std::vector<double> cell_variance_per_record(const Panel& panel,
                                             const BucketPartition& part) {
    require_cover(panel, part);
    const bool binary = panel.mode() == PanelMode::binary;
    std::vector<double> out(panel.size(), 0.0);
    for (const auto& cell : part.cells()) {
        require_cell_size(cell, 2);
        double v = bucket_variance(cell_values(panel, cell), binary);
        for (std::uint32_t i : cell.indices)
            out[i] = v;
    }
    return out;
}

double sigma_hat_sq(const Panel& panel, const BucketPartition& part,
                    const LossSpec& loss) {
    require_cover(panel, part);
    const bool binary = panel.mode() == PanelMode::binary;
    stats::KahanSum sum;
    for (const auto& cell : part.cells()) {
        require_cell_size(cell, 2);
        double v = bucket_variance(cell_values(panel, cell), binary);
        for (std::uint32_t i : cell.indices) {
            double a = linear_coeffs(loss, panel[i].p_hat).a;
            sum.add(a * a * v);
        }
    }
    return sum.value() / static_cast<double>(panel.size());
}

double s_hat_sq(const Panel& panel, const BucketPartition& part, const LossSpec& loss) {
    require_cover(panel, part);
    panel.require_field(ForecastField::p_hat_alt);
    const bool binary = panel.mode() == PanelMode::binary;
    stats::KahanSum sum;
    for (const auto& cell : part.cells()) {
        require_cell_size(cell, 2);
        double v = bucket_variance(cell_values(panel, cell), binary);
        for (std::uint32_t i : cell.indices) {
            double delta = linear_coeffs(loss, panel[i].p_hat).a -
                           linear_coeffs(loss, panel.field(i, ForecastField::p_hat_alt)).a;
            sum.add(delta * delta * v);
        }
    }
    return sum.value() / static_cast<double>(panel.size());
}

double variance_correction(const Panel& panel, const BucketPartition& part) {
    require_cover(panel, part);
    const bool binary = panel.mode() == PanelMode::binary;
    stats::KahanSum sum;
    for (const auto& cell : part.cells()) {
        require_cell_size(cell, 2);
        double v = bucket_variance(cell_values(panel, cell), binary);
        sum.add(static_cast<double>(cell.indices.size()) * v);
    }
    return sum.value() / static_cast<double>(panel.size());
}

double adjusted_brier(const Panel& panel, const BucketPartition& part) {
    if (panel.mode() != PanelMode::binary)
        throw ValidationError("adjusted Brier score requires a binary panel");
    if (panel.size() == 0)
        throw ValidationError("adjusted Brier score over empty panel");
    double correction = variance_correction(panel, part);
    stats::KahanSum raw;
    for (const auto& r : panel.records()) {
        double d = r.y - r.p_hat;
        raw.add(d * d);
    }
    return raw.value() / static_cast<double>(panel.size()) - correction;
}

BetaHatSq beta_hat_sq(const Panel& panel, const BucketPartition& part) {
    if (panel.mode() != PanelMode::binary)
        throw ValidationError("beta_hat_sq requires a binary panel");
    require_cover(panel, part);
    stats::KahanSum total;
    for (const auto& cell : part.cells()) {
        require_cell_size(cell, 3);
        const double m = static_cast<double>(cell.indices.size());

        double ones = 0.0, w_sum = 0.0, w_sq_sum = 0.0;
        for (std::uint32_t i : cell.indices) {
            ones += panel[i].y;
            double w = 1.0 - 2.0 * panel[i].p_hat;
            w_sum += w;
            w_sq_sum += w * w;
        }
        double zeros = m - ones;
        double ybar = ones / m;
        double v_hat = m * ybar * (1.0 - ybar) / (m - 1.0);

        // sum of (y - ybar)^3 from the 0/1 counts
        double s3 = ones * (1.0 - ybar) * (1.0 - ybar) * (1.0 - ybar) -
                    zeros * ybar * ybar * ybar;

        double term1 = v_hat * w_sq_sum;
        double term2 =
            -2.0 * m * m / ((m - 1.0) * (m - 1.0) * (m - 1.0)) * w_sum * s3;

        // Jackknife piece: for 0/1 data the leave-one-out pair sums take only
        // two values, so the O(m^2) scan collapses to the class counts.
        double q_one = zeros / (2.0 * (m - 1.0));
        double q_zero = ones / (2.0 * (m - 1.0));
        double dev = ones * (q_one - v_hat) * (q_one - v_hat) +
                     zeros * (q_zero - v_hat) * (q_zero - v_hat);
        double term3 = 4.0 * m * (m - 1.0) / ((m - 2.0) * (m - 2.0)) * dev;

        total.add(term1);
        total.add(term2);
        total.add(term3);
    }
    BetaHatSq out;
    out.raw = total.value() / static_cast<double>(panel.size());
    out.clamped = out.raw < 0.0;
    out.value = out.clamped ? 0.0 : out.raw;
    return out;
}

double beta_sq_true(const Panel& panel, const BucketPartition& part) {
    if (panel.mode() != PanelMode::binary)
        throw ValidationError("beta_sq_true requires a binary panel");
    require_cover(panel, part);
    if (!panel.all_have_true())
        throw MissingFieldError("beta_sq_true requires p_true on every record");
    stats::KahanSum total;
    for (const auto& cell : part.cells()) {
        require_cell_size(cell, 2);
        const double m = static_cast<double>(cell.indices.size());
        double p = *panel[cell.indices.front()].p_true;
        double w_sum = 0.0, w_sq_sum = 0.0;
        for (std::uint32_t i : cell.indices) {
            if (std::fabs(*panel[i].p_true - p) > 1e-12)
                throw NonConstantTruePError("p_true varies within cell " +
                                            cell_name(cell));
            double w = 1.0 - 2.0 * panel[i].p_hat;
            w_sum += w;
            w_sq_sum += w * w;
        }
        double v = p * (1.0 - p);
        total.add(v * w_sq_sum);
        total.add(-2.0 * v * (1.0 - 2.0 * p) * w_sum);
        total.add(m * v * (1.0 - 4.0 * v));
        total.add(2.0 * m * v * v / (m - 1.0));
    }
    return total.value() / static_cast<double>(panel.size());
}

EvalReport ci_adjusted_brier(const Panel& panel, const BucketPartition& part,
                             double alpha) {
    double estimate = adjusted_brier(panel, part);
    BetaHatSq beta = beta_hat_sq(panel, part);
    std::string notes = "adjusted Brier score; estimates the average squared "
                        "distance between forecasts and true probabilities";
    if (beta.clamped)
        notes += "; variance estimate was negative and clamped to 0";
    return make_report(estimate, beta.value, alpha, panel.size(),
                       VarianceMethod::bucket, std::move(notes));
}

} // namespace fv
