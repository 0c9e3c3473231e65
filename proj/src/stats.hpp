#ifndef FV_STATS_HPP
#define FV_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace fv::stats {

// Compensated (Kahan) accumulator for sums that mix magnitudes.
class KahanSum {
public:
    void add(double x) {
        double y = x - carry_;
        double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

double mean(std::span<const double> values);
double sample_sd(std::span<const double> values);

// Standard normal CDF and its inverse. The inverse uses a rational
// approximation refined with one Newton step; absolute error is well below
// 1e-9 over (0, 1).
double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double q);

// Linear-interpolation (type-7) quantile of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

struct FiveNumber {
    double min, q1, median, q3, max;
};
FiveNumber five_number(std::vector<double> values);

// Kolmogorov-Smirnov distance between a sample and the standard normal law.
double ks_distance_normal(std::vector<double> values);

} // namespace fv::stats

#endif
