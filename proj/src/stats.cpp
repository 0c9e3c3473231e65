#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace fv::stats {

double mean(std::span<const double> values) {
    if (values.empty())
        throw ValidationError("mean of empty sample");
    KahanSum s;
    for (double v : values)
        s.add(v);
    return s.value() / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2)
        throw ValidationError("sample SD needs at least 2 values");
    double m = mean(values);
    KahanSum s;
    for (double v : values)
        s.add((v - m) * (v - m));
    return std::sqrt(s.value() / static_cast<double>(values.size() - 1));
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0))
        throw ValidationError("normal quantile requires q in (0, 1)");

    // Acklam's rational approximation, then one Newton refinement.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    const double phigh = 1.0 - plow;

    double x;
    if (q < plow) {
        double u = std::sqrt(-2.0 * std::log(q));
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else if (q <= phigh) {
        double u = q - 0.5;
        double r = u * u;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double u = std::sqrt(-2.0 * std::log(1.0 - q));
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }

    double err = normal_cdf(x) - q;
    x -= err / normal_pdf(x);
    return x;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty())
        throw ValidationError("quantile of empty sample");
    if (sorted.size() == 1)
        return sorted[0];
    double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    auto lo = static_cast<std::size_t>(h);
    if (lo >= sorted.size() - 1)
        return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

FiveNumber five_number(std::vector<double> values) {
    if (values.empty())
        throw ValidationError("five-number summary of empty sample");
    std::sort(values.begin(), values.end());
    return FiveNumber{values.front(), quantile_sorted(values, 0.25),
                      quantile_sorted(values, 0.5), quantile_sorted(values, 0.75),
                      values.back()};
}

double ks_distance_normal(std::vector<double> values) {
    if (values.empty())
        throw ValidationError("KS distance of empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double f = normal_cdf(values[i]);
        double upper = (static_cast<double>(i) + 1.0) / n - f;
        double lower = f - static_cast<double>(i) / n;
        dist = std::max(dist, std::max(upper, lower));
    }
    return dist;
}

} // namespace fv::stats
