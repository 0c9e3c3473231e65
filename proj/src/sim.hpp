#ifndef FV_SIM_HPP
#define FV_SIM_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "panel.hpp"

namespace fv::sim {

inline constexpr std::uint64_t kDefaultSeed = 12345;

// Scenario ids:
//  1 - two periods of ten size-15 buckets with fixed probabilities; the
//      studentized adjusted Brier score and the beta_hat/beta ratio.
//  2 - nine buckets sized 2,2,2,5,5,24,30,35,45 with Uniform(0,1) bucket
//      probabilities redrawn per period; score difference of the bucket-mean
//      forecast vs the global-mean forecast, s_hat/s ratio.
//  3 - five size-30 buckets with probabilities 0.1..0.9; forecasts as in 2.
//  4 - like 3 but each record's probability is uniform on its bucket's
//      fifth of [0,1], so the bucket model only holds approximately; also
//      drives the reliability-interval coverage study.
struct ScenarioSpec {
    int id = 1;
    std::uint64_t seed = kDefaultSeed;
    int runs = 1000;
};

// Evaluation panel for one run: periods t = 1, 2 with outcomes, bucket
// labels, true probabilities, the bucket-mean forecast, and (scenarios 2-4)
// the global-mean forecast. A warm-up period t = 0 with the same layout
// feeds the forecasts for t = 1 but is not part of the panel.
Panel gen_scenario(const ScenarioSpec& spec, int run_index);

const std::vector<double>& scenario4_bin_edges(); // 0, 0.2, ..., 1

struct BinSeries {
    std::vector<double> p_bar, y_bar, v_true, v_hat; // one entry per run seen
    int nonempty = 0;
    int evaluable = 0; // runs in which the bin had a confidence interval
    int covered = 0;
};

struct MonteCarloSummary {
    int scenario = 0;
    int runs = 0;
    std::uint64_t seed = 0;
    std::vector<double> ratios;      // beta_hat/beta (id 1) or s_hat/s (ids 2-4)
    std::vector<double> studentized; // per run, in run order
    std::vector<int> failed_runs;
    int clamp_events = 0;            // negative beta_hat_sq occurrences
    std::vector<BinSeries> bins;     // scenario 4 only
};

MonteCarloSummary run_monte_carlo(const ScenarioSpec& spec);

// Sorted statistics paired with the normal quantiles Phi^{-1}((i - 0.5) / m).
std::vector<std::pair<double, double>> qq_data(std::vector<double> statistics);

// Worker count for the run loop: FORECASTVAL_THREADS, where 0 or unset means
// one worker per hardware thread.
int thread_budget();

} // namespace fv::sim

#endif
