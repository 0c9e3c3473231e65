// Acceptance suite: exercises every shipped guarantee end to end and prints
// one PASS/FAIL line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "buckets.hpp"
#include "inference.hpp"
#include "losses.hpp"
#include "oracle.hpp"
#include "panel.hpp"
#include "reliability.hpp"
#include "rng.hpp"
#include "sim.hpp"
#include "stats.hpp"

using namespace fv;
using nlohmann::json;

namespace {

int g_failures = 0;

void criterion(int number, bool ok, const std::string& summary) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", number,
                summary.c_str());
    if (!ok)
        ++g_failures;
}

void note(const std::string& text) { std::printf("       %s\n", text.c_str()); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

bool within(double value, double center, double tol) {
    return std::fabs(value - center) <= tol;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

// ---- criteria 1-4 share the four scenario studies ----

struct ScenarioResults {
    sim::MonteCarloSummary summary[4];
    double seconds[4];
};

ScenarioResults run_scenarios() {
    ScenarioResults r;
    for (int id = 1; id <= 4; ++id) {
        sim::ScenarioSpec spec;
        spec.id = id;
        spec.runs = 1000;
        spec.seed = sim::kDefaultSeed;
        auto start = std::chrono::steady_clock::now();
        r.summary[id - 1] = sim::run_monte_carlo(spec);
        r.seconds[id - 1] = elapsed_s(start);
    }
    return r;
}

void criterion_1(const ScenarioResults& r) {
    const double mean_center[] = {1.178, 1.005, 1.001, 1.016};
    const double mean_tol[] = {0.06, 0.03, 0.03, 0.03};
    const double median_center[] = {1.1810, 1.0060, 1.0060, 1.0180};
    bool ok = true;
    std::string detail;
    for (int id = 1; id <= 4; ++id) {
        const auto& s = r.summary[id - 1];
        stats::FiveNumber f = stats::five_number(s.ratios);
        double mean = stats::mean(s.ratios);
        bool mean_ok = within(mean, mean_center[id - 1], mean_tol[id - 1]);
        bool median_ok = within(f.median, median_center[id - 1], 0.04);
        bool time_ok = r.seconds[id - 1] < 60.0;
        bool runs_ok = s.failed_runs.empty() && s.ratios.size() == 1000;
        ok = ok && mean_ok && median_ok && time_ok && runs_ok;
        detail += " s" + std::to_string(id) + " mean " + fmt(mean) + " median " +
                  fmt(f.median) + ";";
    }
    criterion(1, ok, "ratio summaries across the four scenarios:" + detail);
}

void criterion_2(const ScenarioResults& r) {
    const double expected[] = {0.949, 0.947, 0.944, 0.940, 0.928};
    const auto& bins = r.summary[3].bins;
    bool ok = bins.size() == 5;
    std::string detail;
    for (std::size_t j = 0; ok && j < bins.size(); ++j) {
        double coverage = bins[j].evaluable == 0
                              ? -1.0
                              : static_cast<double>(bins[j].covered) / bins[j].evaluable;
        ok = within(coverage, expected[j], 0.025);
        detail += " " + fmt(coverage);
    }
    criterion(2, ok, "scenario-4 per-bin 95% interval coverage:" + detail);
}

void criterion_3(const ScenarioResults& r) {
    const auto& bins = r.summary[3].bins;
    bool ok = bins.size() == 5;
    double p_bar_1 = 0, v_hat_3 = 0, y_bar_sd_3 = 0;
    if (ok) {
        p_bar_1 = stats::mean(bins[0].p_bar);
        v_hat_3 = stats::mean(bins[2].v_hat);
        y_bar_sd_3 = stats::sample_sd(bins[2].y_bar);
        ok = within(p_bar_1, 0.121, 0.02) && within(v_hat_3, 0.244, 0.01) &&
             within(y_bar_sd_3, 0.096, 0.02);
        for (const auto& bin : bins)
            ok = ok && stats::mean(bin.v_hat) >= stats::mean(bin.v_true);
    }
    criterion(3, ok,
              "scenario-4 bin summaries: mean p_bar(1) " + fmt(p_bar_1) +
                  ", mean v_hat(3) " + fmt(v_hat_3) + ", sd y_bar(3) " +
                  fmt(y_bar_sd_3) + ", v_hat dominates v in every bin");
}

void criterion_4(const ScenarioResults& r) {
    bool ok = true;
    std::string detail;
    double ks[4];
    for (int id = 1; id <= 4; ++id) {
        ks[id - 1] = stats::ks_distance_normal(r.summary[id - 1].studentized);
        ok = ok && ks[id - 1] < 0.06;
        detail += " s" + std::to_string(id) + " " + fmt(ks[id - 1]);
    }
    criterion(4, ok, "KS distance of studentized statistics to N(0,1):" + detail);
    if (!ok) {
        note("scenario 1 studentizes by a variance estimate whose jackknife "
             "summand overshoots in expectation; the same overshoot is what");
        note("criterion 1 requires (ratio mean near 1.18), so the scenario-1 "
             "statistic is under-dispersed by construction. With the true");
        note("variance in the denominator the same statistics give KS " +
             [&] {
                 std::vector<double> rescaled = r.summary[0].studentized;
                 for (std::size_t i = 0; i < rescaled.size(); ++i)
                     rescaled[i] *= r.summary[0].ratios[i];
                 return fmt(stats::ks_distance_normal(rescaled));
             }() +
             ", and criteria 1-3 confirm every ingredient feeding it.");
    }
}

// ---- criterion 5: exact enumeration suite ----

void criterion_5() {
    auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string worst;
    double worst_err = 0.0;
    auto record = [&](const std::string& name, double err, double tol = 1e-10) {
        if (err > worst_err) {
            worst_err = err;
            worst = name;
        }
        if (err > tol)
            ok = false;
    };

    const double probs[] = {0.1, 0.3, 0.5, 0.62, 0.9};

    // variance estimate unbiased
    for (double p : probs)
        for (int m : {2, 3, 4, 6})
            record("E[v_hat], p=" + fmt(p) + " m=" + std::to_string(m),
                   oracle::check_a2(p, m).abs_error);

    // third-moment estimate unbiased
    for (double p : probs)
        for (int m : {3, 4, 5, 6})
            record("E[m3_hat], p=" + fmt(p) + " m=" + std::to_string(m),
                   oracle::check_a7(p, m).abs_error);

    // jackknife vs exact variance of v_hat (equality asserted)
    bool jackknife_equal = true;
    double jk_max = 0.0;
    for (double p : probs)
        for (int m : {3, 4, 5, 6}) {
            double err = oracle::check_a8(p, m).abs_error;
            jk_max = std::max(jk_max, err);
            if (err > 1e-10)
                jackknife_equal = false;
        }
    if (!jackknife_equal)
        ok = false;

    // adjusted Brier unbiased for the true-probability average loss
    {
        std::vector<std::vector<double>> forecasts = {{0.2, 0.5, 0.7}, {0.6, 0.1, 0.8}};
        std::vector<double> cell_p = {0.35, 0.8};
        auto build = [&](std::span<const double> y) {
            std::vector<ForecastRecord> records;
            std::size_t idx = 0;
            for (std::size_t c = 0; c < forecasts.size(); ++c)
                for (double ph : forecasts[c]) {
                    ForecastRecord r;
                    r.t = 1;
                    r.k = static_cast<int>(idx);
                    r.y = y[idx++];
                    r.p_hat = ph;
                    r.bucket = "c" + std::to_string(c);
                    records.push_back(r);
                }
            return Panel(std::move(records), PanelMode::binary);
        };
        oracle::EnumerationSpec spec;
        spec.cell_probs = {std::vector<double>(3, cell_p[0]),
                           std::vector<double>(3, cell_p[1])};
        spec.statistic = [&](std::span<const double> y) {
            Panel panel = build(y);
            return adjusted_brier(panel, BucketPartition::by_label(panel));
        };
        double l_n = 0.0;
        for (std::size_t c = 0; c < forecasts.size(); ++c)
            for (double ph : forecasts[c])
                l_n += (cell_p[c] - ph) * (cell_p[c] - ph);
        l_n /= 6.0;
        record("E[adjusted Brier]",
               std::fabs(oracle::exact_expectation(spec) - l_n));
    }

    // beta_hat_sq vs beta_sq_true (equality asserted)
    bool beta_equal = true;
    double beta_max = 0.0;
    for (int m : {3, 4, 5, 6}) {
        std::vector<double> forecasts;
        for (int i = 0; i < m; ++i)
            forecasts.push_back(0.15 + 0.1 * i);
        double p = 0.45;
        auto build = [&](std::span<const double> y) {
            std::vector<ForecastRecord> records;
            for (int i = 0; i < m; ++i) {
                ForecastRecord r;
                r.t = 1;
                r.k = i;
                r.y = y[static_cast<std::size_t>(i)];
                r.p_hat = forecasts[static_cast<std::size_t>(i)];
                r.p_true = p;
                r.bucket = "c";
                records.push_back(r);
            }
            return Panel(std::move(records), PanelMode::binary);
        };
        oracle::EnumerationSpec spec;
        spec.cell_probs = {std::vector<double>(static_cast<std::size_t>(m), p)};
        spec.statistic = [&](std::span<const double> y) {
            Panel panel = build(y);
            return beta_hat_sq(panel, BucketPartition::by_label(panel)).raw;
        };
        std::vector<double> zeros(static_cast<std::size_t>(m), 0.0);
        Panel reference = build(zeros);
        double truth = beta_sq_true(reference, BucketPartition::by_label(reference));
        double err = std::fabs(oracle::exact_expectation(spec) - truth);
        beta_max = std::max(beta_max, err);
        if (err > 1e-10)
            beta_equal = false;
    }
    if (!beta_equal)
        ok = false;

    // pooled conservativeness with equality iff probabilities coincide
    {
        std::vector<double> unequal = {0.2, 0.5, 0.9};
        oracle::CheckResult c = oracle::check_eq513(unequal);
        if (!(c.actual > c.expected + 1e-12))
            ok = false;
        std::vector<double> equal(4, 0.37);
        c = oracle::check_eq513(equal);
        record("E[m v_hat] equality at equal p", std::fabs(c.actual - c.expected));
    }

    double secs = elapsed_s(start);
    if (secs >= 5.0)
        ok = false;
    criterion(5, ok,
              "exact enumeration suite in " + fmt(secs) + " s; worst equality gap " +
                  worst + " = " + (worst_err < 1e-10 ? "<1e-10" : fmt(worst_err)) +
                  "; jackknife max gap " + fmt(jk_max) + "; beta max gap " +
                  fmt(beta_max));
    if (!jackknife_equal) {
        note("the jackknife estimate of Var(v_hat) is upward biased in small "
             "cells for any 0/1 distribution (exact enumeration shows strict");
        note("domination, e.g. m=4, p=0.5: E[jackknife] = 1/32 vs exact 1/96); "
             "equality to 1e-10 is not achievable for any cell size <= 6.");
    }
    if (!beta_equal)
        note("the variance estimate for the adjusted Brier score inherits that "
             "upward bias through its jackknife summand, which is exactly the "
             "ratio overshoot criterion 1 reproduces.");
}

// ---- criterion 6: algebraic identities ----

void criterion_6() {
    bool ok = true;

    // a deterministic mixed panel
    CounterRng rng(2718, 0, 0);
    std::vector<ForecastRecord> records;
    for (int t = 1; t <= 3; ++t)
        for (int k = 0; k < 40; ++k) {
            ForecastRecord r;
            r.t = t;
            r.k = k;
            r.p_hat = rng.uniform();
            r.y = rng.bernoulli(0.2 + 0.6 * r.p_hat);
            r.bucket = "g" + std::to_string(k % 5);
            records.push_back(r);
        }
    Panel panel(std::move(records), PanelMode::binary);
    BucketPartition part = BucketPartition::by_label(panel);

    // adjusted Brier + correction = raw Brier
    double raw = average_score(panel, LossSpec::squared_error());
    double recombined = adjusted_brier(panel, part) + variance_correction(panel, part);
    ok = ok && std::fabs(recombined - raw) <= 1e-12;

    // the two variance formulas coincide on 0/1 data
    double v_gap = 0.0;
    for (const auto& cell : part.cells()) {
        std::vector<double> values;
        for (auto i : cell.indices)
            values.push_back(panel[i].y);
        v_gap = std::max(v_gap, std::fabs(bucket_variance(values, true) -
                                          sample_variance(values)));
    }
    ok = ok && v_gap <= 1e-12;

    // loss minus linear equivalent is forecast-free on a grid
    double residual_gap = 0.0;
    for (const LossSpec& loss :
         {LossSpec::squared_error(), LossSpec::kullback_leibler()}) {
        for (double p = 0.05; p < 1.0; p += 0.05) {
            double ref = eval_loss(loss, p, 0.45) - linear_equivalent_value(loss, p, 0.45);
            for (double ph = 0.05; ph < 1.0; ph += 0.05) {
                double res =
                    eval_loss(loss, p, ph) - linear_equivalent_value(loss, p, ph);
                residual_gap = std::max(residual_gap, std::fabs(res - ref));
            }
        }
    }
    ok = ok && residual_gap <= 1e-12;

    criterion(6, ok,
              "algebraic identities: score recombination " +
                  std::string(std::fabs(recombined - raw) <= 1e-12 ? "exact" : "off") +
                  ", variance forms gap " + fmt(v_gap) + ", linear-equivalent residual gap " +
                  fmt(residual_gap) + " (all at 1e-12)");
}

void criterion_7() {
    ProprietyResult brier = check_propriety(LossSpec::squared_error(), 0.01);
    ProprietyResult abs = check_propriety(LossSpec::absolute(), 0.01);
    bool ok = brier.classification == Propriety::strictly_proper &&
              abs.classification == Propriety::improper && abs.witness.has_value();
    std::string witness = "none";
    if (abs.witness) {
        double diag = linear_equivalent_value(LossSpec::absolute(), abs.witness->first,
                                              abs.witness->first);
        double off = linear_equivalent_value(LossSpec::absolute(), abs.witness->first,
                                             abs.witness->second);
        ok = ok && diag > off + 1e-12;
        witness = "(" + fmt(abs.witness->first) + ", " + fmt(abs.witness->second) + ")";
    }
    criterion(7, ok,
              std::string("propriety: squared error ") + to_string(brier.classification) +
                  ", absolute " + to_string(abs.classification) + " with witness " +
                  witness);
}

// ---- criterion 8: real-data pathway stand-in ----

std::string run_cli(const std::string& args, int& exit_code) {
    std::string out_file = std::string(FV_TEST_TMPDIR) + "/acceptance_cli_out.txt";
    std::string cmd = std::string(FV_CLI_PATH) + " " + args + " > " + out_file +
                      " 2> /dev/null";
    int status = std::system(cmd.c_str());
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_8() {
    bool ok = true;

    // 660 synthetic days with a pair of lead-time forecasts
    const int days = 660;
    CounterRng rng(31415, 0, 0);
    std::vector<double> y(days), worse(days), better(days);
    for (int t = 0; t < days; ++t) {
        double p = 0.15 + 0.1 * std::sin(t / 30.0) + 0.05 * rng.uniform();
        auto clip = [](double v) { return std::min(1.0, std::max(0.0, v)); };
        better[t] = clip(p + rng.uniform(-0.08, 0.08));
        worse[t] = clip(p + rng.uniform(-0.2, 0.2));
        y[t] = rng.bernoulli(p);
    }
    std::string path = std::string(FV_TEST_TMPDIR) + "/acceptance_queens.csv";
    {
        std::ofstream out(path);
        out << "t,k,y,p_hat,p_hat_alt\n";
        out.precision(17);
        for (int t = 0; t < days; ++t)
            out << t + 1 << ",0," << y[t] << ',' << worse[t] << ',' << better[t]
                << "\n";
    }

    int code = -1;
    std::string report = run_cli("compare " + path + " --loss brier --variance quarter",
                                 code);
    ok = ok && code == 0;

    double estimate = 0.0, lo = 0.0, hi = 0.0, se = 0.0;
    if (ok) {
        json j = json::parse(report);
        estimate = j["estimate"].get<double>();
        lo = j["ci"][0].get<double>();
        hi = j["ci"][1].get<double>();
        se = j["std_error"].get<double>();
    }

    // spreadsheet-style recomputation: plain running sums, the published
    // normal quantile, no shared code path
    double sum_diff = 0.0, sum_var = 0.0;
    for (int t = 0; t < days; ++t) {
        double s_worse = (y[t] - worse[t]) * (y[t] - worse[t]);
        double s_better = (y[t] - better[t]) * (y[t] - better[t]);
        sum_diff += s_worse - s_better;
        double delta = (1.0 - 2.0 * worse[t]) - (1.0 - 2.0 * better[t]);
        sum_var += delta * delta * 0.25;
    }
    double est_ref = sum_diff / days;
    double se_ref = std::sqrt(sum_var / days / days);
    const double z975 = 1.959963984540054;
    double gap = std::max({std::fabs(estimate - est_ref),
                           std::fabs(lo - (est_ref - z975 * se_ref)),
                           std::fabs(hi - (est_ref + z975 * se_ref)),
                           std::fabs(se - se_ref)});
    ok = ok && gap <= 1e-12;

    // Winkler interval widths shrink as climatology moves away from zero
    bool monotone = true;
    {
        CounterRng wr(9090, 0, 0);
        std::vector<double> wy, wph;
        for (int i = 0; i < 200; ++i) {
            wph.push_back(wr.uniform(0.0, 0.04));
            wy.push_back(wr.bernoulli(0.03));
        }
        double prev_width = std::numeric_limits<double>::infinity();
        for (int step = 1; step <= 10; ++step) {
            double c = 0.05 * step;
            std::vector<ForecastRecord> records;
            for (std::size_t i = 0; i < wy.size(); ++i) {
                ForecastRecord r;
                r.t = 1;
                r.k = static_cast<int>(i);
                r.y = wy[i];
                r.p_hat = wph[i];
                r.p_clim = c;
                records.push_back(r);
            }
            Panel panel(std::move(records), PanelMode::binary);
            WinklerResult res = winkler_score(panel, LossSpec::squared_error(), 0.05,
                                              VarianceSource::quarter());
            double width = res.report.ci_hi - res.report.ci_lo;
            monotone = monotone && width < prev_width;
            prev_width = width;
        }
    }
    ok = ok && monotone;

    criterion(8, ok,
              "synthetic 660-day comparison via the CLI matches an independent "
              "recomputation (max gap " +
                  (gap <= 1e-12 ? std::string("<=1e-12") : fmt(gap)) +
                  "); Winkler widths shrink monotonically as climatology grows: " +
                  (monotone ? "yes" : "no"));
}

} // namespace

int main() {
    std::printf("== acceptance suite ==\n");
    ScenarioResults scenarios = run_scenarios();
    criterion_1(scenarios);
    criterion_2(scenarios);
    criterion_3(scenarios);
    criterion_4(scenarios);
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("== %d of 8 criteria failed ==\n", g_failures);
    return g_failures;
}
