// Command-line front end. Everything goes through the C API in
// forecastval/forecastval.h; this file only maps flags to option documents
// and files to handles.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "forecastval/forecastval.h"

namespace {

using nlohmann::json;

constexpr size_t kErrBufSize = 4096;

struct PanelDeleter {
    void operator()(fv_panel* p) const { fv_panel_free(p); }
};
using PanelHandle = std::unique_ptr<fv_panel, PanelDeleter>;

struct StringDeleter {
    void operator()(char* s) const { fv_string_free(s); }
};
using ApiString = std::unique_ptr<char, StringDeleter>;

struct CommonFlags {
    std::string input;
    std::vector<std::string> columns; // canonical=header pairs
    bool general = false;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("input", flags.input, "input CSV file")->required();
    cmd->add_option("--col", flags.columns,
                    "column remap canonical=header (repeatable)");
    cmd->add_flag("--general", flags.general,
                  "treat outcomes as real-valued instead of 0/1");
    cmd->add_option("--out", flags.out, "write the JSON report here instead of stdout");
}

std::string column_map_json(const std::vector<std::string>& columns) {
    json m = json::object();
    for (const auto& spec : columns) {
        std::size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
            throw CLI::ValidationError("--col", "expected canonical=header, got '" +
                                                    spec + "'");
        m[spec.substr(0, eq)] = spec.substr(eq + 1);
    }
    return m.empty() ? std::string() : m.dump();
}

std::vector<double> parse_number_list(const std::string& flag, const std::string& text) {
    std::vector<double> values;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) {
                try {
                    values.push_back(std::stod(cur));
                } catch (const std::exception&) {
                    throw CLI::ValidationError(flag, "cannot parse value '" + cur + "'");
                }
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    return values;
}

PanelHandle load_panel(const CommonFlags& flags, char* errbuf) {
    fv_panel* raw = nullptr;
    std::string colmap = column_map_json(flags.columns);
    fv_status st = fv_panel_load_csv(flags.input.c_str(),
                                     colmap.empty() ? nullptr : colmap.c_str(),
                                     flags.general ? 1 : 0, &raw, errbuf, kErrBufSize);
    if (st != FV_OK) {
        std::cerr << errbuf << "\n";
        throw static_cast<int>(st);
    }
    return PanelHandle(raw);
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write to " << path << "\n";
        throw 1;
    }
    out << text << "\n";
}

// Shared driver for the panel-based report commands.
template <typename Fn>
void run_report(const CommonFlags& flags, const json& options, Fn&& api_call) {
    char errbuf[kErrBufSize] = {0};
    PanelHandle panel = load_panel(flags, errbuf);
    char* json_out = nullptr;
    fv_status st = api_call(panel.get(), options.dump().c_str(), &json_out, errbuf);
    ApiString guard(json_out);
    if (st != FV_OK) {
        std::cerr << errbuf << "\n";
        throw static_cast<int>(st);
    }
    write_text(json_out, flags.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"forecast verification with martingale confidence intervals"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fv_version()));

    // score
    auto* score = app.add_subcommand("score", "average score of a forecast column");
    CommonFlags score_flags;
    std::string score_loss = "brier", score_variance = "quarter",
                score_by = "label", score_bins, score_field = "p_hat";
    double score_alpha = 0.05, score_clip = 0.0;
    add_common(score, score_flags);
    score->add_option("--loss", score_loss, "brier|kl|log|absolute");
    score->add_option("--alpha", score_alpha, "two-sided interval level");
    score->add_option("--variance", score_variance, "quarter|bucket|quasi")
        ->check(CLI::IsMember({"quarter", "bucket", "quasi"}));
    score->add_option("--by", score_by, "bucket source: label|bins");
    score->add_option("--bins", score_bins, "comma-separated bin edges over [0,1]");
    score->add_option("--field", score_field, "p_hat|p_hat_alt|p_clim");
    score->add_option("--clip-epsilon", score_clip, "clamp for log-type losses");

    // compare
    auto* compare = app.add_subcommand("compare",
                                       "difference of average scores of p_hat and p_hat_alt");
    CommonFlags compare_flags;
    std::string compare_loss = "brier", compare_variance = "quarter",
                compare_by = "label", compare_bins, compare_mode = "linear";
    double compare_alpha = 0.05, compare_clip = 0.0;
    add_common(compare, compare_flags);
    compare->add_option("--loss", compare_loss, "brier|kl|log|absolute");
    compare->add_option("--alpha", compare_alpha, "two-sided interval level");
    compare->add_option("--variance", compare_variance, "quarter|bucket|quasi")
        ->check(CLI::IsMember({"quarter", "bucket", "quasi"}));
    compare->add_option("--by", compare_by, "bucket source: label|bins");
    compare->add_option("--bins", compare_bins, "comma-separated bin edges over [0,1]");
    compare->add_option("--mode", compare_mode,
                        "linear (needs a linear equivalent) or general")
        ->check(CLI::IsMember({"linear", "general"}));
    compare->add_option("--clip-epsilon", compare_clip, "clamp for log-type losses");

    // winkler
    auto* winkler = app.add_subcommand("winkler", "Winkler's skill score with interval");
    CommonFlags winkler_flags;
    std::string winkler_loss = "brier", winkler_variance = "quarter",
                winkler_by = "label", winkler_bins, winkler_degenerate = "error";
    double winkler_alpha = 0.05, winkler_clip = 0.0;
    add_common(winkler, winkler_flags);
    winkler->add_option("--loss", winkler_loss, "brier|kl|log");
    winkler->add_option("--alpha", winkler_alpha, "two-sided interval level");
    winkler->add_option("--variance", winkler_variance, "quarter|bucket|quasi")
        ->check(CLI::IsMember({"quarter", "bucket", "quasi"}));
    winkler->add_option("--by", winkler_by, "bucket source: label|bins");
    winkler->add_option("--bins", winkler_bins, "comma-separated bin edges over [0,1]");
    winkler->add_option("--degenerate", winkler_degenerate,
                        "policy when a forecast equals climatology: error|skip")
        ->check(CLI::IsMember({"error", "skip"}));
    winkler->add_option("--clip-epsilon", winkler_clip, "clamp for log-type losses");

    // skill
    auto* skill = app.add_subcommand("skill", "percentage improvement over climatology");
    CommonFlags skill_flags;
    std::string skill_loss = "brier";
    double skill_clip = 0.0;
    add_common(skill, skill_flags);
    skill->add_option("--loss", skill_loss, "brier|kl|log|absolute");
    skill->add_option("--clip-epsilon", skill_clip, "clamp for log-type losses");

    // buckets
    auto* buckets = app.add_subcommand("buckets", "per-cell bucket statistics");
    CommonFlags buckets_flags;
    std::string buckets_by = "label", buckets_bins;
    bool buckets_adjusted = false;
    double buckets_alpha = 0.05;
    add_common(buckets, buckets_flags);
    buckets->add_option("--by", buckets_by, "label|bins");
    buckets->add_option("--bins", buckets_bins, "comma-separated bin edges over [0,1]");
    buckets->add_flag("--adjusted-brier", buckets_adjusted,
                      "include the adjusted Brier report");
    buckets->add_option("--alpha", buckets_alpha, "level for the adjusted Brier interval");

    // reliability
    auto* reliability = app.add_subcommand("reliability",
                                           "reliability diagram with valid intervals");
    CommonFlags reliability_flags;
    std::string reliability_bins, reliability_csv;
    double reliability_alpha = 0.05;
    bool reliability_naive = false;
    add_common(reliability, reliability_flags);
    reliability->add_option("--bins", reliability_bins, "comma-separated bin edges over [0,1]")
        ->required();
    reliability->add_option("--alpha", reliability_alpha, "two-sided interval level");
    reliability->add_flag("--naive", reliability_naive,
                          "also report the i.i.d.-assumption intervals");
    reliability->add_option("--plot-csv", reliability_csv,
                            "write plot-ready CSV to this path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "scenario studies");
    int sim_scenario = 0, sim_runs = 1000, sim_run = 0;
    std::uint64_t sim_seed = 12345;
    std::string sim_emit = "table2", sim_csv, sim_out;
    simulate->add_option("--scenario", sim_scenario, "scenario id 1..4")->required();
    simulate->add_option("--runs", sim_runs, "number of Monte Carlo runs");
    simulate->add_option("--seed", sim_seed, "base seed");
    simulate->add_option("--emit", sim_emit, "table2|table3|qq|coverage|panel")
        ->check(CLI::IsMember({"table2", "table3", "qq", "coverage", "panel"}));
    simulate->add_option("--run", sim_run, "run index for --emit panel");
    simulate->add_option("--csv", sim_csv, "write plot-ready CSV here (qq, panel)");
    simulate->add_option("--out", sim_out, "write the JSON summary here instead of stdout");

    // verify
    auto* verify = app.add_subcommand("verify", "exact enumeration checks");
    std::string verify_check, verify_p, verify_out;
    int verify_m = 0;
    verify->add_option("--check", verify_check, "a2|a7|a8|eq513")
        ->required()
        ->check(CLI::IsMember({"a2", "a7", "a8", "eq513"}));
    verify->add_option("--p", verify_p, "comma-separated probabilities")->required();
    verify->add_option("--m", verify_m, "cell size when --p has one entry");
    verify->add_option("--out", verify_out, "write the JSON result here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        char errbuf[kErrBufSize] = {0};
        if (*score) {
            json o{{"loss", score_loss},         {"alpha", score_alpha},
                   {"variance", score_variance}, {"by", score_by},
                   {"field", score_field},       {"clip_epsilon", score_clip}};
            if (!score_bins.empty())
                o["bins"] = parse_number_list("--bins", score_bins);
            run_report(score_flags, o, [](const fv_panel* p, const char* opt,
                                          char** out, char* err) {
                return fv_score(p, opt, out, err, kErrBufSize);
            });
        } else if (*compare) {
            json o{{"loss", compare_loss},         {"alpha", compare_alpha},
                   {"variance", compare_variance}, {"by", compare_by},
                   {"mode", compare_mode},         {"clip_epsilon", compare_clip}};
            if (!compare_bins.empty())
                o["bins"] = parse_number_list("--bins", compare_bins);
            run_report(compare_flags, o, [](const fv_panel* p, const char* opt,
                                            char** out, char* err) {
                return fv_compare(p, opt, out, err, kErrBufSize);
            });
        } else if (*winkler) {
            json o{{"loss", winkler_loss},
                   {"alpha", winkler_alpha},
                   {"variance", winkler_variance},
                   {"by", winkler_by},
                   {"degenerate", winkler_degenerate},
                   {"clip_epsilon", winkler_clip}};
            if (!winkler_bins.empty())
                o["bins"] = parse_number_list("--bins", winkler_bins);
            run_report(winkler_flags, o,
                       [](const fv_panel* p, const char* opt, char** out, char* err) {
                           fv_status st = fv_winkler(p, opt, out, err, kErrBufSize);
                           if (st == FV_OK && *out) {
                               auto skipped = json::parse(*out)["skipped"].get<long long>();
                               if (skipped > 0)
                                   std::cerr << "warning: skipped " << skipped
                                             << " record(s) whose forecast equals "
                                                "climatology\n";
                           }
                           return st;
                       });
        } else if (*skill) {
            json o{{"loss", skill_loss}, {"clip_epsilon", skill_clip}};
            run_report(skill_flags, o, [](const fv_panel* p, const char* opt,
                                          char** out, char* err) {
                return fv_skill(p, opt, out, err, kErrBufSize);
            });
        } else if (*buckets) {
            json o{{"by", buckets_by},
                   {"adjusted_brier", buckets_adjusted},
                   {"alpha", buckets_alpha}};
            if (!buckets_bins.empty())
                o["bins"] = parse_number_list("--bins", buckets_bins);
            run_report(buckets_flags, o, [](const fv_panel* p, const char* opt,
                                            char** out, char* err) {
                return fv_buckets(p, opt, out, err, kErrBufSize);
            });
        } else if (*reliability) {
            json o{{"alpha", reliability_alpha},
                   {"naive", reliability_naive},
                   {"bins", parse_number_list("--bins", reliability_bins)}};
            PanelHandle panel = load_panel(reliability_flags, errbuf);
            char* json_out = nullptr;
            char* csv_out = nullptr;
            fv_status st = fv_reliability(panel.get(), o.dump().c_str(), &json_out,
                                          reliability_csv.empty() ? nullptr : &csv_out,
                                          errbuf, kErrBufSize);
            ApiString jguard(json_out), cguard(csv_out);
            if (st != FV_OK) {
                std::cerr << errbuf << "\n";
                return st;
            }
            json parsed = json::parse(json_out);
            for (const auto& bin : parsed["bins"]) {
                long long n = bin["n"].get<long long>();
                auto singles = bin["singleton_cells"].get<long long>();
                if (n == 0)
                    std::cerr << "warning: bin " << bin["bin"] << " is empty\n";
                else if (singles > 0)
                    std::cerr << "warning: bin " << bin["bin"] << " has " << singles
                              << " singleton cell(s), excluded from v_hat\n";
            }
            write_text(json_out, reliability_flags.out);
            if (!reliability_csv.empty()) {
                std::ofstream csv(reliability_csv);
                if (!csv) {
                    std::cerr << "cannot write to " << reliability_csv << "\n";
                    return 1;
                }
                csv << csv_out;
            }
        } else if (*simulate) {
            json o{{"scenario", sim_scenario}, {"runs", sim_runs},  {"seed", sim_seed},
                   {"emit", sim_emit},         {"run", sim_run}};
            char* json_out = nullptr;
            char* csv_out = nullptr;
            bool want_csv = !sim_csv.empty();
            fv_status st = fv_simulate(o.dump().c_str(), &json_out,
                                       want_csv ? &csv_out : nullptr, errbuf,
                                       kErrBufSize);
            ApiString jguard(json_out), cguard(csv_out);
            if (st != FV_OK) {
                std::cerr << errbuf << "\n";
                return st;
            }
            write_text(json_out, sim_out);
            if (want_csv) {
                if (!csv_out) {
                    std::cerr << "--csv given but emit '" << sim_emit
                              << "' has no plot-ready data\n";
                    return 1;
                }
                std::ofstream csv(sim_csv);
                if (!csv) {
                    std::cerr << "cannot write to " << sim_csv << "\n";
                    return 1;
                }
                csv << csv_out;
            }
        } else if (*verify) {
            json o{{"check", verify_check}, {"p", parse_number_list("--p", verify_p)}};
            if (verify_m > 0)
                o["m"] = verify_m;
            char* json_out = nullptr;
            fv_status st = fv_verify(o.dump().c_str(), &json_out, errbuf, kErrBufSize);
            ApiString guard(json_out);
            if (st != FV_OK) {
                std::cerr << errbuf << "\n";
                return st;
            }
            write_text(json_out, verify_out);
        }
        return 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (int code) {
        return code;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
