#include "forecastval/forecastval.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "buckets.hpp"
#include "errors.hpp"
#include "inference.hpp"
#include "oracle.hpp"
#include "panel.hpp"
#include "reliability.hpp"
#include "serialize.hpp"
#include "sim.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

struct fv_panel {
    fv::Panel impl;
};

namespace {

void set_error(char* errbuf, size_t errbuf_size, const std::string& msg) {
    if (!errbuf || errbuf_size == 0)
        return;
    std::snprintf(errbuf, errbuf_size, "%s", msg.c_str());
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
fv_status guarded(char* errbuf, size_t errbuf_size, Fn&& fn) {
    try {
        fn();
        return FV_OK;
    } catch (const fv::Error& e) {
        set_error(errbuf, errbuf_size, e.name() + ": " + e.what());
        return e.exit_code() == 2 ? FV_ERR_PRECONDITION : FV_ERR_VALIDATION;
    } catch (const std::exception& e) {
        set_error(errbuf, errbuf_size, e.what());
        return FV_ERR_VALIDATION;
    }
}

json parse_options(const char* options_json) {
    if (!options_json || !*options_json)
        return json::object();
    json o = json::parse(options_json, nullptr, false);
    if (o.is_discarded() || !o.is_object())
        throw fv::ValidationError("options must be a JSON object");
    return o;
}

fv::LossSpec loss_from(const json& o) {
    std::string name = o.value("loss", "brier");
    double clip = o.value("clip_epsilon", 0.0);
    if (!(clip >= 0.0 && clip < 0.5))
        throw fv::ValidationError("clip_epsilon must lie in [0, 0.5)");
    return fv::LossSpec::from_name(name, clip);
}

double alpha_from(const json& o) {
    double alpha = o.value("alpha", 0.05);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw fv::ValidationError("alpha must lie in (0, 1)");
    return alpha;
}

std::vector<double> bins_from(const json& o) {
    if (!o.contains("bins") || !o["bins"].is_array())
        throw fv::InvalidBinsError("bin edges required (option \"bins\")");
    std::vector<double> edges;
    for (const auto& e : o["bins"])
        edges.push_back(e.get<double>());
    return edges;
}

fv::BucketPartition make_partition(const fv::Panel& panel, const json& o) {
    std::string by = o.value("by", "label");
    if (by == "label")
        return fv::BucketPartition::by_label(panel);
    if (by == "bins")
        return fv::BucketPartition::by_bins(panel, bins_from(o));
    throw fv::ValidationError("option \"by\" must be \"label\" or \"bins\"");
}

// Keeps the optional partition alive next to the variance source that
// points at it.
struct SourceBundle {
    std::unique_ptr<fv::BucketPartition> partition;
    fv::VarianceMethod method = fv::VarianceMethod::conservative_quarter;

    fv::VarianceSource source() const {
        switch (method) {
        case fv::VarianceMethod::conservative_quarter:
            return fv::VarianceSource::quarter();
        case fv::VarianceMethod::bucket:
            return fv::VarianceSource::bucket(*partition);
        case fv::VarianceMethod::quasi_bucket:
            return fv::VarianceSource::quasi_bucket(*partition);
        case fv::VarianceMethod::supplied_true_p:
            return fv::VarianceSource::true_p();
        }
        throw fv::ValidationError("unreachable variance method");
    }
};

SourceBundle make_source(const fv::Panel& panel, const json& o) {
    std::string variance = o.value("variance", "quarter");
    SourceBundle bundle;
    if (variance == "quarter") {
        bundle.method = fv::VarianceMethod::conservative_quarter;
    } else if (variance == "true_p") {
        bundle.method = fv::VarianceMethod::supplied_true_p;
    } else if (variance == "bucket" || variance == "quasi") {
        bundle.partition =
            std::make_unique<fv::BucketPartition>(make_partition(panel, o));
        bundle.method = variance == "bucket" ? fv::VarianceMethod::bucket
                                             : fv::VarianceMethod::quasi_bucket;
    } else {
        throw fv::ValidationError(
            "variance must be one of quarter, bucket, quasi, true_p");
    }
    return bundle;
}

fv::ForecastField field_from(const json& o) {
    std::string f = o.value("field", "p_hat");
    if (f == "p_hat")
        return fv::ForecastField::p_hat;
    if (f == "p_hat_alt")
        return fv::ForecastField::p_hat_alt;
    if (f == "p_clim")
        return fv::ForecastField::p_clim;
    throw fv::ValidationError("field must be p_hat, p_hat_alt or p_clim");
}

void emit(char** json_out, const ordered_json& j) {
    *json_out = dup_string(fv::dump_json(j));
}

const fv::Panel& deref(const fv_panel* panel) {
    if (!panel)
        throw fv::ValidationError("NULL panel handle");
    return panel->impl;
}

} // namespace

extern "C" {

const char* fv_version(void) { return "forecastval 1.0.0"; }

fv_status fv_panel_load_csv(const char* path, const char* column_map_json,
                            int general_mode, fv_panel** out, char* errbuf,
                            size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        if (!path || !out)
            throw fv::ValidationError("path and out handle required");
        fv::ColumnMap columns;
        if (column_map_json && *column_map_json) {
            json m = json::parse(column_map_json, nullptr, false);
            if (m.is_discarded() || !m.is_object())
                throw fv::ValidationError("column map must be a JSON object");
            for (auto it = m.begin(); it != m.end(); ++it)
                columns[it.key()] = it.value().get<std::string>();
        }
        fv::Panel panel = fv::load_csv(
            path, columns, general_mode ? fv::PanelMode::general : fv::PanelMode::binary);
        *out = new fv_panel{std::move(panel)};
    });
}

void fv_panel_free(fv_panel* panel) { delete panel; }

long long fv_panel_size(const fv_panel* panel) {
    return panel ? static_cast<long long>(panel->impl.size()) : -1;
}

int fv_panel_periods(const fv_panel* panel) {
    return panel ? panel->impl.period_count() : -1;
}

fv_status fv_score(const fv_panel* panel, const char* options_json,
                   char** json_out, char* errbuf, size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        const fv::Panel& p = deref(panel);
        json o = parse_options(options_json);
        SourceBundle bundle = make_source(p, o);
        fv::EvalReport report = fv::ci_average_loss(p, loss_from(o), alpha_from(o),
                                                    bundle.source(), field_from(o));
        emit(json_out, fv::to_json(report));
    });
}

fv_status fv_compare(const fv_panel* panel, const char* options_json,
                     char** json_out, char* errbuf, size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        const fv::Panel& p = deref(panel);
        json o = parse_options(options_json);
        fv::LossSpec loss = loss_from(o);
        double alpha = alpha_from(o);
        if (p.mode() == fv::PanelMode::general) {
            fv::BucketPartition part = make_partition(p, o);
            emit(json_out,
                 fv::to_json(fv::compare_general_predictands(p, loss, alpha, part)));
            return;
        }
        std::string mode = o.value("mode", "linear");
        fv::CompareMode cmode;
        if (mode == "linear")
            cmode = fv::CompareMode::linear_equivalent;
        else if (mode == "general")
            cmode = fv::CompareMode::general;
        else
            throw fv::ValidationError("mode must be \"linear\" or \"general\"");
        SourceBundle bundle = make_source(p, o);
        emit(json_out, fv::to_json(fv::compare_forecasts(p, loss, alpha,
                                                         bundle.source(), cmode)));
    });
}

fv_status fv_winkler(const fv_panel* panel, const char* options_json,
                     char** json_out, char* errbuf, size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        const fv::Panel& p = deref(panel);
        json o = parse_options(options_json);
        std::string policy = o.value("degenerate", "error");
        fv::DegenerateWeightPolicy dp;
        if (policy == "error")
            dp = fv::DegenerateWeightPolicy::error;
        else if (policy == "skip")
            dp = fv::DegenerateWeightPolicy::skip_with_count;
        else
            throw fv::ValidationError("degenerate must be \"error\" or \"skip\"");
        SourceBundle bundle = make_source(p, o);
        fv::WinklerResult res = fv::winkler_score(p, loss_from(o), alpha_from(o),
                                                  bundle.source(), dp);
        ordered_json j = fv::to_json(res.report);
        j["skipped"] = res.skipped;
        emit(json_out, j);
    });
}

fv_status fv_skill(const fv_panel* panel, const char* options_json,
                   char** json_out, char* errbuf, size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        const fv::Panel& p = deref(panel);
        json o = parse_options(options_json);
        fv::LossSpec loss = loss_from(o);
        double value = fv::skill_score(p, loss);
        emit(json_out, ordered_json{{"estimate", value},
                                    {"n", p.size()},
                                    {"loss", loss.name()},
                                    {"notes", "skill score is not a proper score; "
                                              "point value only, no interval"}});
    });
}

fv_status fv_buckets(const fv_panel* panel, const char* options_json,
                     char** json_out, char* errbuf, size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        const fv::Panel& p = deref(panel);
        json o = parse_options(options_json);
        fv::BucketPartition part = make_partition(p, o);
        ordered_json cells = ordered_json::array();
        for (const auto& cs : fv::bucket_stats(p, part))
            cells.push_back(fv::to_json(cs));
        ordered_json j{{"n", p.size()},
                       {"periods", p.period_count()},
                       {"cell_count", part.cells().size()},
                       {"min_cell_size", part.min_cell_size()},
                       {"cells", std::move(cells)}};
        if (o.value("adjusted_brier", false))
            j["adjusted_brier"] =
                fv::to_json(fv::ci_adjusted_brier(p, part, alpha_from(o)));
        emit(json_out, j);
    });
}

fv_status fv_reliability(const fv_panel* panel, const char* options_json,
                         char** json_out, char** csv_out, char* errbuf,
                         size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        const fv::Panel& p = deref(panel);
        json o = parse_options(options_json);
        std::vector<double> edges = bins_from(o);
        double alpha = alpha_from(o);
        bool naive = o.value("naive", false);
        std::vector<fv::ReliabilityBin> bins = fv::reliability_diagram(p, edges, alpha);
        ordered_json arr = ordered_json::array();
        for (const auto& b : bins)
            arr.push_back(fv::to_json(b, naive));
        ordered_json j{{"alpha", alpha}, {"n", p.size()}, {"bins", std::move(arr)}};
        emit(json_out, j);
        if (csv_out)
            *csv_out = dup_string(fv::reliability_plot_csv(bins));
    });
}

fv_status fv_simulate(const char* options_json, char** json_out, char** csv_out,
                      char* errbuf, size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        json o = parse_options(options_json);
        fv::sim::ScenarioSpec spec;
        spec.id = o.value("scenario", 0);
        spec.runs = o.value("runs", 1000);
        spec.seed = o.value("seed", fv::sim::kDefaultSeed);
        std::string mode = o.value("emit", "table2");

        if (mode == "panel") {
            int run = o.value("run", 0);
            fv::Panel panel = fv::sim::gen_scenario(spec, run);
            emit(json_out, ordered_json{{"scenario", spec.id},
                                        {"seed", spec.seed},
                                        {"run", run},
                                        {"n", panel.size()},
                                        {"periods", panel.period_count()}});
            if (csv_out)
                *csv_out = dup_string(fv::write_csv(panel));
            return;
        }

        fv::sim::MonteCarloSummary summary = fv::sim::run_monte_carlo(spec);
        if (mode == "table2") {
            emit(json_out, fv::summary_table2_json(summary));
        } else if (mode == "table3") {
            emit(json_out, fv::summary_table3_json(summary));
        } else if (mode == "coverage") {
            emit(json_out, fv::summary_coverage_json(summary));
        } else if (mode == "qq") {
            emit(json_out, fv::summary_qq_json(summary));
            if (csv_out)
                *csv_out = dup_string(fv::qq_plot_csv(summary));
        } else {
            throw fv::ValidationError(
                "emit must be one of table2, table3, qq, coverage, panel");
        }
    });
}

fv_status fv_verify(const char* options_json, char** json_out, char* errbuf,
                    size_t errbuf_size) {
    return guarded(errbuf, errbuf_size, [&] {
        json o = parse_options(options_json);
        std::string check = o.value("check", "");
        if (!o.contains("p") || !o["p"].is_array() || o["p"].empty())
            throw fv::ValidationError("option \"p\" must be a non-empty array");
        std::vector<double> probs;
        for (const auto& v : o["p"])
            probs.push_back(v.get<double>());

        fv::oracle::CheckResult result;
        if (check == "eq513") {
            result = fv::oracle::check_eq513(probs);
        } else if (check == "a2" || check == "a7" || check == "a8") {
            int m = o.value("m", static_cast<int>(probs.size()));
            if (probs.size() > 1) {
                for (double p : probs)
                    if (p != probs[0])
                        throw fv::ValidationError(
                            "checks a2/a7/a8 need equal probabilities; use eq513 "
                            "for unequal ones");
                m = static_cast<int>(probs.size());
            }
            if (check == "a2")
                result = fv::oracle::check_a2(probs[0], m);
            else if (check == "a7")
                result = fv::oracle::check_a7(probs[0], m);
            else
                result = fv::oracle::check_a8(probs[0], m);
        } else {
            throw fv::ValidationError("check must be one of a2, a7, a8, eq513");
        }
        emit(json_out, fv::to_json(result));
    });
}

void fv_string_free(char* s) { std::free(s); }

} // extern "C"
