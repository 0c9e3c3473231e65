#include "oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

#include "buckets.hpp"
#include "errors.hpp"
#include "stats.hpp"

namespace fv::oracle {

namespace {

struct Flattened {
    std::vector<double> probs;
};

Flattened flatten(const EnumerationSpec& spec) {
    Flattened f;
    for (const auto& cell : spec.cell_probs)
        for (double p : cell) {
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError("enumeration probability out of [0, 1]");
            f.probs.push_back(p);
        }
    if (f.probs.empty())
        throw ValidationError("enumeration over empty record set");
    if (f.probs.size() > spec.max_total_records || f.probs.size() > 30)
        throw TooLargeError("enumeration over " + std::to_string(f.probs.size()) +
                            " records exceeds the cap of " +
                            std::to_string(spec.max_total_records));
    return f;
}

// Visits all outcome vectors in Gray-code order so each step flips a single
// bit and the probability product is updated incrementally.
template <typename Visitor>
void enumerate(const std::vector<double>& probs, Visitor&& visit) {
    const std::size_t n = probs.size();
    std::vector<double> outcomes(n, 0.0);

    bool degenerate = false;
    for (double p : probs)
        degenerate = degenerate || p == 0.0 || p == 1.0;

    auto full_product = [&]() {
        double prob = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            prob *= outcomes[i] == 1.0 ? probs[i] : 1.0 - probs[i];
        return prob;
    };

    double prob = full_product();
    visit(std::span<const double>(outcomes), prob);
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < count; ++step) {
        unsigned bit = static_cast<unsigned>(std::countr_zero(step));
        double& y = outcomes[bit];
        if (degenerate) {
            y = 1.0 - y;
            prob = full_product();
        } else if (y == 0.0) {
            y = 1.0;
            prob *= probs[bit] / (1.0 - probs[bit]);
        } else {
            y = 0.0;
            prob *= (1.0 - probs[bit]) / probs[bit];
        }
        visit(std::span<const double>(outcomes), prob);
    }
}

} // namespace

Moments exact_moments(const EnumerationSpec& spec) {
    if (!spec.statistic)
        throw ValidationError("enumeration needs a statistic");
    Flattened f = flatten(spec);
    stats::KahanSum e, e2, mass;
    enumerate(f.probs, [&](std::span<const double> outcomes, double prob) {
        double s = spec.statistic(outcomes);
        e.add(prob * s);
        e2.add(prob * s * s);
        mass.add(prob);
    });
    Moments m;
    m.expectation = e.value();
    m.variance = e2.value() - e.value() * e.value();
    m.prob_mass = mass.value();
    return m;
}

double exact_expectation(const EnumerationSpec& spec) {
    return exact_moments(spec).expectation;
}

double exact_variance(const EnumerationSpec& spec) {
    return exact_moments(spec).variance;
}

namespace {

EnumerationSpec equal_p_cell(double p, int m,
                             std::function<double(std::span<const double>)> stat) {
    if (m < 2)
        throw ValidationError("cell checks need m >= 2");
    EnumerationSpec spec;
    spec.cell_probs = {std::vector<double>(static_cast<std::size_t>(m), p)};
    spec.statistic = std::move(stat);
    return spec;
}

CheckResult finish(CheckResult r, double tol = 1e-10) {
    r.abs_error = std::fabs(r.actual - r.expected);
    r.pass = r.abs_error <= tol;
    return r;
}

} // namespace

CheckResult check_a2(double p, int m) {
    EnumerationSpec spec = equal_p_cell(
        p, m, [](std::span<const double> y) { return sample_variance(y); });
    CheckResult r;
    r.check = "a2";
    r.probs = spec.cell_probs[0];
    r.expected = p * (1.0 - p);
    r.actual = exact_expectation(spec);
    r.detail = "E[cell variance estimate] vs p(1-p), m = " + std::to_string(m);
    return finish(r);
}

CheckResult check_a7(double p, int m) {
    if (m < 3)
        throw ValidationError("check a7 needs m >= 3");
    EnumerationSpec spec = equal_p_cell(
        p, m, [](std::span<const double> y) { return third_moment_estimate(y); });
    CheckResult r;
    r.check = "a7";
    r.probs = spec.cell_probs[0];
    r.expected = p * (1.0 - p) * (1.0 - 2.0 * p);
    r.actual = exact_expectation(spec);
    r.detail = "E[third-moment estimate] vs p(1-p)(1-2p), m = " + std::to_string(m);
    return finish(r);
}

CheckResult check_a8(double p, int m) {
    if (m < 3)
        throw ValidationError("check a8 needs m >= 3");
    EnumerationSpec var_spec = equal_p_cell(
        p, m, [](std::span<const double> y) { return sample_variance(y); });
    double var_of_vhat = exact_variance(var_spec);
    EnumerationSpec jk_spec = equal_p_cell(p, m, [](std::span<const double> y) {
        return jackknife_var_of_sample_variance(y);
    });
    CheckResult r;
    r.check = "a8";
    r.probs = jk_spec.cell_probs[0];
    r.expected = var_of_vhat;
    r.actual = exact_expectation(jk_spec);
    r.abs_error = std::fabs(r.actual - r.expected);
    // The jackknife dominates the exact sampling variance in small cells
    // (equality only as the cell grows), so the check is one-sided.
    r.pass = r.actual >= r.expected - 1e-12;
    r.detail = "E[jackknife estimate] vs exact Var(cell variance estimate), m = " +
               std::to_string(m) + "; passes when the jackknife dominates";
    return r;
}

CheckResult check_eq513(std::span<const double> probs) {
    if (probs.size() < 2)
        throw ValidationError("check eq513 needs at least 2 probabilities");
    const double m = static_cast<double>(probs.size());
    EnumerationSpec spec;
    spec.cell_probs = {std::vector<double>(probs.begin(), probs.end())};
    spec.statistic = [m](std::span<const double> y) {
        return m * sample_variance(y);
    };

    double lhs = exact_expectation(spec);
    double rhs = 0.0;
    bool all_equal = true;
    for (double p : probs) {
        rhs += p * (1.0 - p);
        all_equal = all_equal && p == probs[0];
    }

    CheckResult r;
    r.check = "eq513";
    r.probs.assign(probs.begin(), probs.end());
    r.expected = rhs;
    r.actual = lhs;
    r.abs_error = lhs - rhs; // signed slack: conservative when >= 0
    r.pass = all_equal ? std::fabs(lhs - rhs) <= 1e-10 : lhs >= rhs - 1e-12;
    r.detail = all_equal
                   ? "equal probabilities: E[m v_hat] must equal sum p_i(1-p_i)"
                   : "unequal probabilities: E[m v_hat] must dominate sum p_i(1-p_i)";
    return r;
}

} // namespace fv::oracle
