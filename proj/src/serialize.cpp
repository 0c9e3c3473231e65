#include "serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "stats.hpp"

namespace fv {

std::string format_double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

using nlohmann::ordered_json;

void dump_value(const ordered_json& j, std::string& out, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent >= 0) {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    switch (j.type()) {
    case ordered_json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += ordered_json(it.key()).dump();
            out += indent >= 0 ? ": " : ":";
            dump_value(it.value(), out, indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case ordered_json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            dump_value(v, out, indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case ordered_json::value_t::number_float: {
        double v = j.get<double>();
        if (std::isfinite(v))
            out += format_double17(v);
        else
            out += "null";
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

ordered_json opt(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json five_number_json(const std::vector<double>& values) {
    stats::FiveNumber f = stats::five_number(values);
    return ordered_json{{"min", f.min},
                        {"q1", f.q1},
                        {"median", f.median},
                        {"q3", f.q3},
                        {"max", f.max},
                        {"mean", stats::mean(values)},
                        {"sd", values.size() > 1 ? ordered_json(stats::sample_sd(values))
                                                 : ordered_json(nullptr)}};
}

} // namespace

std::string dump_json(const nlohmann::ordered_json& j, int indent) {
    std::string out;
    dump_value(j, out, indent, 0);
    return out;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
    return ordered_json{{"estimate", report.estimate},
                        {"std_error", report.std_error},
                        {"ci", ordered_json::array({report.ci_lo, report.ci_hi})},
                        {"alpha", report.alpha},
                        {"n", report.n},
                        {"variance_method", to_string(report.variance_method)},
                        {"notes", report.notes}};
}

nlohmann::ordered_json to_json(const CellStats& cell) {
    return ordered_json{{"t", cell.t},          {"bucket", cell.label},
                        {"n", cell.n},          {"y_bar", cell.y_bar},
                        {"v_hat", cell.v_hat},  {"m3_hat", opt(cell.m3_hat)},
                        {"jackknife", opt(cell.jackknife)}};
}

nlohmann::ordered_json to_json(const ReliabilityBin& bin, bool include_naive) {
    ordered_json j{{"bin", bin.j},
                   {"lo", bin.lo},
                   {"hi", bin.hi},
                   {"mid", 0.5 * (bin.lo + bin.hi)},
                   {"n", bin.n_j},
                   {"y_bar", opt(bin.y_bar)},
                   {"v_hat", opt(bin.v_hat)},
                   {"ci", ordered_json::array({opt(bin.ci_lo), opt(bin.ci_hi)})}};
    if (include_naive)
        j["naive_ci"] = ordered_json::array({opt(bin.naive_lo), opt(bin.naive_hi)});
    j["singleton_cells"] = bin.singleton_cells;
    ordered_json periods = ordered_json::array();
    for (const auto& p : bin.per_period)
        periods.push_back(ordered_json{
            {"t", p.t}, {"n", p.n}, {"y_bar", p.y_bar}, {"v_hat", opt(p.v_hat)}});
    j["per_period"] = std::move(periods);
    return j;
}

nlohmann::ordered_json to_json(const oracle::CheckResult& check) {
    return ordered_json{{"check", check.check},     {"p", check.probs},
                        {"expected", check.expected}, {"actual", check.actual},
                        {"abs_error", check.abs_error}, {"pass", check.pass},
                        {"detail", check.detail}};
}

std::string reliability_plot_csv(const std::vector<ReliabilityBin>& bins) {
    std::string out = "bin_mid,y_bar,ci_lo,ci_hi,naive_lo,naive_hi,n_j\n";
    auto clipped = [](const std::optional<double>& v) {
        if (!v)
            return std::string();
        return format_double17(std::min(1.0, std::max(0.0, *v)));
    };
    for (const auto& b : bins) {
        out += format_double17(0.5 * (b.lo + b.hi));
        out += ',';
        out += b.y_bar ? format_double17(*b.y_bar) : std::string();
        out += ',';
        out += clipped(b.ci_lo);
        out += ',';
        out += clipped(b.ci_hi);
        out += ',';
        out += clipped(b.naive_lo);
        out += ',';
        out += clipped(b.naive_hi);
        out += ',';
        out += std::to_string(b.n_j);
        out += '\n';
    }
    return out;
}

namespace {

ordered_json summary_header(const sim::MonteCarloSummary& s) {
    return ordered_json{{"scenario", s.scenario},
                        {"runs", s.runs},
                        {"seed", s.seed},
                        {"completed_runs", s.ratios.size()},
                        {"failed_runs", s.failed_runs},
                        {"clamp_events", s.clamp_events}};
}

} // namespace

nlohmann::ordered_json summary_table2_json(const sim::MonteCarloSummary& s) {
    ordered_json j = summary_header(s);
    j["ratio_name"] = s.scenario == 1 ? "beta_hat/beta" : "s_hat/s";
    j["ratio"] = five_number_json(s.ratios);
    j["studentized_ks_normal"] = stats::ks_distance_normal(s.studentized);
    return j;
}

nlohmann::ordered_json summary_table3_json(const sim::MonteCarloSummary& s) {
    if (s.bins.empty())
        throw ValidationError("table3 summaries exist only for scenario 4");
    ordered_json j = summary_header(s);
    ordered_json bins = ordered_json::array();
    const auto& edges = sim::scenario4_bin_edges();
    for (std::size_t b = 0; b < s.bins.size(); ++b) {
        const auto& series = s.bins[b];
        ordered_json bj{{"bin", b + 1},
                        {"lo", edges[b]},
                        {"hi", edges[b + 1]},
                        {"nonempty_runs", series.nonempty}};
        bj["p_bar"] = series.p_bar.empty() ? ordered_json(nullptr)
                                           : five_number_json(series.p_bar);
        bj["y_bar"] = series.y_bar.empty() ? ordered_json(nullptr)
                                           : five_number_json(series.y_bar);
        bj["v"] = series.v_true.empty() ? ordered_json(nullptr)
                                        : five_number_json(series.v_true);
        bj["v_hat"] = series.v_hat.empty() ? ordered_json(nullptr)
                                           : five_number_json(series.v_hat);
        bins.push_back(std::move(bj));
    }
    j["bins"] = std::move(bins);
    return j;
}

nlohmann::ordered_json summary_coverage_json(const sim::MonteCarloSummary& s) {
    if (s.bins.empty())
        throw ValidationError("coverage summaries exist only for scenario 4");
    ordered_json j = summary_header(s);
    j["alpha"] = 0.05;
    ordered_json bins = ordered_json::array();
    const auto& edges = sim::scenario4_bin_edges();
    for (std::size_t b = 0; b < s.bins.size(); ++b) {
        const auto& series = s.bins[b];
        ordered_json bj{{"bin", b + 1},
                        {"lo", edges[b]},
                        {"hi", edges[b + 1]},
                        {"evaluable_runs", series.evaluable},
                        {"covered_runs", series.covered}};
        bj["coverage"] = series.evaluable == 0
                             ? ordered_json(nullptr)
                             : ordered_json(static_cast<double>(series.covered) /
                                            static_cast<double>(series.evaluable));
        bins.push_back(std::move(bj));
    }
    j["bins"] = std::move(bins);
    return j;
}

nlohmann::ordered_json summary_qq_json(const sim::MonteCarloSummary& s) {
    ordered_json j = summary_header(s);
    j["ks_normal"] = stats::ks_distance_normal(s.studentized);
    ordered_json points = ordered_json::array();
    for (const auto& [nq, eq] : sim::qq_data(s.studentized))
        points.push_back(ordered_json::array({nq, eq}));
    j["points"] = std::move(points);
    return j;
}

std::string qq_plot_csv(const sim::MonteCarloSummary& s) {
    std::string out = "normal_quantile,empirical_quantile\n";
    for (const auto& [nq, eq] : sim::qq_data(s.studentized)) {
        out += format_double17(nq);
        out += ',';
        out += format_double17(eq);
        out += '\n';
    }
    return out;
}

} // namespace fv
