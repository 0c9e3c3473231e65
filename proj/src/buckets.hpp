#ifndef FV_BUCKETS_HPP
#define FV_BUCKETS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "losses.hpp"
#include "panel.hpp"
#include "report.hpp"

namespace fv {

// Unbiased sample variance, sum (x - xbar)^2 / (m - 1). Needs m >= 2.
double sample_variance(std::span<const double> values);

// Same estimate computed from the relative frequency, m ybar (1 - ybar) / (m-1),
// exact for 0/1 outcomes. `binary` selects that closed form.
double bucket_variance(std::span<const double> values, bool binary = true);

// Conditionally unbiased estimate of p(1-p)(1-2p):
// [m / ((m-1)(m-2))] * sum (y - ybar)^3. Needs m >= 3.
double third_moment_estimate(std::span<const double> values);

// Arvesen's jackknife estimate of Var(sample variance); unbiased for i.i.d.
// samples. Needs m >= 3.
double jackknife_var_of_sample_variance(std::span<const double> values);

struct CellStats {
    int t = 0;
    std::string label;
    std::size_t n = 0;
    double y_bar = 0.0;
    double v_hat = 0.0;
    std::optional<double> m3_hat;    // needs n >= 3
    std::optional<double> jackknife; // needs n >= 3
};

std::vector<CellStats> bucket_stats(const Panel& panel, const BucketPartition& part);

// v_hat of the cell containing each record; cells must have size >= 2.
std::vector<double> cell_variance_per_record(const Panel& panel,
                                             const BucketPartition& part);

// Bucket-model estimates of the asymptotic variances behind the average-loss
// and loss-difference statistics: weighted sums of per-cell v_hat with
// weights a(p_hat)^2 and delta^2 respectively.
double sigma_hat_sq(const Panel& panel, const BucketPartition& part, const LossSpec& loss);
double s_hat_sq(const Panel& panel, const BucketPartition& part, const LossSpec& loss);

// n^{-1} sum over cells of n_cell * v_hat(cell).
double variance_correction(const Panel& panel, const BucketPartition& part);

// Raw Brier average minus the bucket-variance correction; a consistent
// estimate of the average squared distance between forecasts and the true
// probabilities.
double adjusted_brier(const Panel& panel, const BucketPartition& part);

struct BetaHatSq {
    double value = 0.0; // clamped at 0
    double raw = 0.0;
    bool clamped = false;
};

// Variance estimate for the studentized adjusted Brier score. Cells need
// size >= 3. Negative raw values are clamped to 0 and flagged.
BetaHatSq beta_hat_sq(const Panel& panel, const BucketPartition& part);

// Same quantity evaluated with the supplied true probabilities (which must be
// constant within each cell); simulation-only reference value.
double beta_sq_true(const Panel& panel, const BucketPartition& part);

EvalReport ci_adjusted_brier(const Panel& panel, const BucketPartition& part, double alpha);

} // namespace fv

#endif
