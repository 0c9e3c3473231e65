#include "reliability.hpp"

#include <cmath>
#include <map>

#include "buckets.hpp"
#include "errors.hpp"
#include "stats.hpp"

namespace fv {

std::vector<ReliabilityBin> reliability_diagram(const Panel& panel,
                                                std::span<const double> edges,
                                                double alpha) {
    BucketPartition part = BucketPartition::by_bins(panel, edges);
    return reliability_diagram(panel, part, alpha);
}

std::vector<ReliabilityBin> reliability_diagram(const Panel& panel,
                                                const BucketPartition& part,
                                                double alpha) {
    if (panel.mode() != PanelMode::binary)
        throw ValidationError("reliability diagram requires a binary panel");
    if (!part.from_bins())
        throw InvalidBinsError("reliability diagram needs a bins partition");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("alpha must lie in (0, 1)");

    const auto& edges = part.bin_edges();
    const int bins = part.bin_count();
    const double z = stats::normal_quantile(1.0 - alpha / 2.0);

    std::vector<ReliabilityBin> out(static_cast<std::size_t>(bins));
    for (int j = 0; j < bins; ++j) {
        out[j].j = j + 1;
        out[j].lo = edges[j];
        out[j].hi = edges[j + 1];
    }

    struct Acc {
        double y_sum = 0.0;
        std::size_t n = 0;
        double weighted_v = 0.0; // sum of n_cell * v_hat over multi cells
        std::size_t multi_n = 0; // records in cells of size >= 2
    };
    std::vector<Acc> acc(static_cast<std::size_t>(bins));

    for (const auto& cell : part.cells()) {
        int j = cell.bin_index;
        auto& bin = out[j];
        auto& a = acc[j];
        double cell_sum = 0.0;
        for (std::uint32_t i : cell.indices)
            cell_sum += panel[i].y;
        const std::size_t m = cell.indices.size();
        a.y_sum += cell_sum;
        a.n += m;

        PeriodCellSummary pcs;
        pcs.t = cell.t;
        pcs.n = m;
        pcs.y_bar = cell_sum / static_cast<double>(m);
        if (m >= 2) {
            std::vector<double> values;
            values.reserve(m);
            for (std::uint32_t i : cell.indices)
                values.push_back(panel[i].y);
            double v = bucket_variance(values, true);
            pcs.v_hat = v;
            a.weighted_v += static_cast<double>(m) * v;
            a.multi_n += m;
        } else {
            ++bin.singleton_cells;
        }
        bin.per_period.push_back(pcs);
    }

    for (int j = 0; j < bins; ++j) {
        auto& bin = out[j];
        const auto& a = acc[j];
        bin.n_j = a.n;
        if (a.n == 0)
            continue; // empty bin: reported without estimates
        double ybar = a.y_sum / static_cast<double>(a.n);
        bin.y_bar = ybar;
        bin.naive_lo = ybar - z * std::sqrt(ybar * (1.0 - ybar) / static_cast<double>(a.n));
        bin.naive_hi = ybar + z * std::sqrt(ybar * (1.0 - ybar) / static_cast<double>(a.n));
        if (a.multi_n > 0) {
            double v = a.weighted_v / static_cast<double>(a.multi_n);
            bin.v_hat = v;
            double half = z * std::sqrt(v / static_cast<double>(a.n));
            bin.ci_lo = ybar - half;
            bin.ci_hi = ybar + half;
        }
    }
    return out;
}

namespace {

double tilde_weighted_sum(const Panel& panel, const BucketPartition& part,
                          const std::vector<double>& weights) {
    if (part.total() != panel.size())
        throw MissingBucketError("partition does not cover the panel");
    stats::KahanSum sum;
    for (const auto& cell : part.cells()) {
        const std::size_t m = cell.indices.size();
        if (m < 2)
            throw CellTooSmallError("cell (t=" + std::to_string(cell.t) +
                                    ", bucket=" + cell.label +
                                    ") has size 1, needs >= 2");
        double ysum = 0.0;
        for (std::uint32_t i : cell.indices)
            ysum += panel[i].y;
        double ybar = ysum / static_cast<double>(m);
        double correction = static_cast<double>(m) / static_cast<double>(m - 1);
        for (std::uint32_t i : cell.indices) {
            double d = panel[i].y - ybar;
            sum.add(weights[i] * weights[i] * d * d * correction);
        }
    }
    return sum.value() / static_cast<double>(panel.size());
}

} // namespace

double sigma_tilde_sq(const Panel& panel, const BucketPartition& part,
                      const LossSpec& loss) {
    std::vector<double> w(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i)
        w[i] = linear_coeffs(loss, panel[i].p_hat).a;
    return tilde_weighted_sum(panel, part, w);
}

double s_tilde_sq(const Panel& panel, const BucketPartition& part,
                  const LossSpec& loss) {
    panel.require_field(ForecastField::p_hat_alt);
    std::vector<double> w(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i)
        w[i] = linear_coeffs(loss, panel[i].p_hat).a -
               linear_coeffs(loss, panel.field(i, ForecastField::p_hat_alt)).a;
    return tilde_weighted_sum(panel, part, w);
}

} // namespace fv
