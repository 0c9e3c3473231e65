#ifndef FV_RELIABILITY_HPP
#define FV_RELIABILITY_HPP

#include <optional>
#include <span>
#include <vector>

#include "losses.hpp"
#include "panel.hpp"

namespace fv {

struct PeriodCellSummary {
    int t = 0;
    std::size_t n = 0;
    double y_bar = 0.0;
    std::optional<double> v_hat; // absent for singleton cells
};

struct ReliabilityBin {
    int j = 0; // 1-based bin index
    double lo = 0.0, hi = 0.0;
    std::size_t n_j = 0;
    std::optional<double> y_bar;
    std::optional<double> v_hat;
    // Interval bounds are kept untruncated; clip to [0, 1] for display only.
    std::optional<double> ci_lo, ci_hi;
    std::optional<double> naive_lo, naive_hi;
    std::size_t singleton_cells = 0;
    std::vector<PeriodCellSummary> per_period;
};

// Observed event frequency per forecast bin with quasi-bucket confidence
// intervals, plus the i.i.d.-assumption interval for comparison. Cells of
// size 1 keep their outcome in y_bar but contribute nothing to v_hat.
std::vector<ReliabilityBin> reliability_diagram(const Panel& panel,
                                                std::span<const double> edges,
                                                double alpha);

// Same computation on an existing bins partition (shared with simulation
// code so binning is identical on both sides).
std::vector<ReliabilityBin> reliability_diagram(const Panel& panel,
                                                const BucketPartition& part,
                                                double alpha);

// Conservative quasi-bucket variance estimates for the average-loss and
// loss-difference statistics; every cell must have size >= 2.
double sigma_tilde_sq(const Panel& panel, const BucketPartition& part,
                      const LossSpec& loss);
double s_tilde_sq(const Panel& panel, const BucketPartition& part,
                  const LossSpec& loss);

} // namespace fv

#endif
