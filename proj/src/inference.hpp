#ifndef FV_INFERENCE_HPP
#define FV_INFERENCE_HPP

#include <optional>
#include <vector>

#include "losses.hpp"
#include "panel.hpp"
#include "report.hpp"

namespace fv {

// How the Bernoulli variances p_i (1 - p_i) in the studentization are
// approximated: the 1/4 upper bound, per-cell bucket estimates, per-record
// quasi-bucket terms, or the supplied true probabilities (simulation only).
struct VarianceSource {
    VarianceMethod method = VarianceMethod::conservative_quarter;
    const BucketPartition* partition = nullptr;

    static VarianceSource quarter() { return {VarianceMethod::conservative_quarter, nullptr}; }
    static VarianceSource bucket(const BucketPartition& p) { return {VarianceMethod::bucket, &p}; }
    static VarianceSource quasi_bucket(const BucketPartition& p) { return {VarianceMethod::quasi_bucket, &p}; }
    static VarianceSource true_p() { return {VarianceMethod::supplied_true_p, nullptr}; }
};

// Per-record proxy for p_i (1 - p_i) under the chosen source.
std::vector<double> variance_proxies(const Panel& panel, const VarianceSource& source);

double average_score(const Panel& panel, const LossSpec& loss,
                     ForecastField field = ForecastField::p_hat);

EvalReport ci_average_loss(const Panel& panel, const LossSpec& loss, double alpha,
                           const VarianceSource& source,
                           ForecastField field = ForecastField::p_hat);

enum class CompareMode { linear_equivalent, general };

// Difference of average scores of p_hat and p_hat_alt with a martingale CI.
EvalReport compare_forecasts(const Panel& panel, const LossSpec& loss, double alpha,
                             const VarianceSource& source,
                             CompareMode mode = CompareMode::linear_equivalent);

// Score-difference inference for real-valued outcomes; buckets are mandatory
// because the 1/4 bound has no analogue for general predictands.
EvalReport compare_general_predictands(const Panel& panel, const LossSpec& loss,
                                       double alpha, const BucketPartition& part);

// Percentage improvement in average score over climatology. Not a proper
// score; reported as a point value without an interval.
double skill_score(const Panel& panel, const LossSpec& loss);

// Winkler's per-record weight l(p, c).
double winkler_weight(const LossSpec& loss, double p_hat, double p_clim);

enum class DegenerateWeightPolicy { error, skip_with_count };

struct WinklerResult {
    EvalReport report;
    std::size_t skipped = 0;
};

WinklerResult winkler_score(const Panel& panel, const LossSpec& loss, double alpha,
                            const VarianceSource& source,
                            DegenerateWeightPolicy policy = DegenerateWeightPolicy::error);

} // namespace fv

#endif
