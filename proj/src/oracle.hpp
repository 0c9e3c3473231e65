#ifndef FV_ORACLE_HPP
#define FV_ORACLE_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fv::oracle {

// Exact expectation machinery: enumerates every 0/1 outcome vector of a
// small panel, weighting a statistic by the product Bernoulli probability.
// Outcomes are grouped into cells only for the caller's bookkeeping; the
// statistic sees the concatenated vector.
struct EnumerationSpec {
    std::vector<std::vector<double>> cell_probs;
    std::function<double(std::span<const double>)> statistic;
    std::size_t max_total_records = 20;
};

double exact_expectation(const EnumerationSpec& spec);
double exact_variance(const EnumerationSpec& spec);

struct Moments {
    double expectation = 0.0;
    double variance = 0.0;
    double prob_mass = 0.0; // total probability enumerated; 1 up to rounding
};
Moments exact_moments(const EnumerationSpec& spec);

// Named auditor checks exposed through the `verify` CLI subcommand.
struct CheckResult {
    std::string check;
    std::vector<double> probs;
    double expected = 0.0;
    double actual = 0.0;
    double abs_error = 0.0;
    bool pass = false;
    std::string detail;
};

// a2: cell variance estimate is unbiased for p(1-p).
CheckResult check_a2(double p, int m);
// a7: scaled third central moment is unbiased for p(1-p)(1-2p); m >= 3.
CheckResult check_a7(double p, int m);
// a8: the jackknife estimate dominates the exact variance of the sample
// variance (one-sided; small-cell equality does not hold); m >= 3.
CheckResult check_a8(double p, int m);
// eq513: E[m v_hat] >= sum p_i(1-p_i), with equality iff all p_i are equal.
CheckResult check_eq513(std::span<const double> probs);

} // namespace fv::oracle

#endif
