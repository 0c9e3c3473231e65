#include <doctest.h>

#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "forecastval/forecastval.h"

using nlohmann::json;

namespace {

constexpr size_t kBuf = 4096;

struct Panel {
    fv_panel* handle = nullptr;
    ~Panel() { fv_panel_free(handle); }
};

struct Str {
    char* s = nullptr;
    ~Str() { fv_string_free(s); }
};

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string(FV_TEST_TMPDIR) + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kPanelCsv = "t,k,y,p_hat,p_hat_alt,p_clim,bucket\n"
                        "1,0,1,0.8,0.5,0.3,a\n"
                        "1,1,0,0.2,0.5,0.3,a\n"
                        "1,2,1,0.7,0.5,0.3,b\n"
                        "1,3,0,0.4,0.5,0.3,b\n"
                        "2,0,1,0.9,0.5,0.3,a\n"
                        "2,1,0,0.1,0.5,0.3,a\n"
                        "2,2,1,0.6,0.5,0.3,b\n"
                        "2,3,1,0.5,0.5,0.3,b\n";

} // namespace

TEST_CASE("panel loading and handle queries") {
    char err[kBuf] = {0};
    std::string path = write_temp("capi_panel.csv", kPanelCsv);

    Panel p;
    REQUIRE(fv_panel_load_csv(path.c_str(), nullptr, 0, &p.handle, err, kBuf) == FV_OK);
    CHECK(fv_panel_size(p.handle) == 8);
    CHECK(fv_panel_periods(p.handle) == 2);

    CHECK(fv_panel_size(nullptr) == -1);
    CHECK(fv_panel_periods(nullptr) == -1);

    fv_panel* bad = nullptr;
    CHECK(fv_panel_load_csv("/nonexistent/file.csv", nullptr, 0, &bad, err, kBuf) ==
          FV_ERR_VALIDATION);
    CHECK(std::strlen(err) > 0);
}

TEST_CASE("column remapping through the C API") {
    char err[kBuf] = {0};
    std::string path =
        write_temp("capi_remap.csv", "day,hit,prob\n1,1,0.8\n1,0,0.4\n");
    Panel p;
    REQUIRE(fv_panel_load_csv(path.c_str(),
                              R"({"t":"day","y":"hit","p_hat":"prob"})", 0,
                              &p.handle, err, kBuf) == FV_OK);
    CHECK(fv_panel_size(p.handle) == 2);
}

TEST_CASE("score reports are well-formed and reproducible") {
    char err[kBuf] = {0};
    std::string path = write_temp("capi_panel.csv", kPanelCsv);
    Panel p;
    REQUIRE(fv_panel_load_csv(path.c_str(), nullptr, 0, &p.handle, err, kBuf) == FV_OK);

    Str a, b;
    REQUIRE(fv_score(p.handle, R"({"loss":"brier","alpha":0.05})", &a.s, err, kBuf) ==
            FV_OK);
    REQUIRE(fv_score(p.handle, R"({"loss":"brier","alpha":0.05})", &b.s, err, kBuf) ==
            FV_OK);
    CHECK(std::strcmp(a.s, b.s) == 0); // byte-identical on equal input

    json j = json::parse(a.s);
    CHECK(j["n"] == 8);
    CHECK(j["variance_method"] == "conservative_quarter");
    CHECK(j["ci"].size() == 2);
    CHECK(j["ci"][0].get<double>() <= j["estimate"].get<double>());
    CHECK(j["estimate"].get<double>() <= j["ci"][1].get<double>());

    // field order is fixed
    std::string text(a.s);
    CHECK(text.find("\"estimate\"") < text.find("\"std_error\""));
    CHECK(text.find("\"std_error\"") < text.find("\"ci\""));
}

TEST_CASE("status codes distinguish validation from preconditions") {
    char err[kBuf] = {0};
    std::string path = write_temp("capi_panel.csv", kPanelCsv);
    Panel p;
    REQUIRE(fv_panel_load_csv(path.c_str(), nullptr, 0, &p.handle, err, kBuf) == FV_OK);

    Str out;
    // absolute loss has no linear equivalent: precondition failure
    CHECK(fv_score(p.handle, R"({"loss":"absolute"})", &out.s, err, kBuf) ==
          FV_ERR_PRECONDITION);
    CHECK(std::string(err).find("NoLinearEquivalentError") != std::string::npos);

    // unknown option value: validation failure
    CHECK(fv_score(p.handle, R"({"variance":"magic"})", &out.s, err, kBuf) ==
          FV_ERR_VALIDATION);

    // NULL handle
    CHECK(fv_score(nullptr, "{}", &out.s, err, kBuf) == FV_ERR_VALIDATION);
}

TEST_CASE("bucket preconditions travel through the API") {
    char err[kBuf] = {0};
    std::string path = write_temp(
        "capi_tiny.csv", "t,y,p_hat,bucket\n1,1,0.5,a\n1,0,0.4,a\n1,1,0.6,b\n");
    Panel p;
    REQUIRE(fv_panel_load_csv(path.c_str(), nullptr, 0, &p.handle, err, kBuf) == FV_OK);

    Str out;
    CHECK(fv_buckets(p.handle, R"({"adjusted_brier":true})", &out.s, err, kBuf) ==
          FV_ERR_PRECONDITION);
    CHECK(std::string(err).find("CellTooSmallError") != std::string::npos);
    CHECK(std::string(err).find("b") != std::string::npos); // names the cell
}

TEST_CASE("compare, winkler, skill, reliability") {
    char err[kBuf] = {0};
    std::string path = write_temp("capi_panel.csv", kPanelCsv);
    Panel p;
    REQUIRE(fv_panel_load_csv(path.c_str(), nullptr, 0, &p.handle, err, kBuf) == FV_OK);

    Str cmp;
    REQUIRE(fv_compare(p.handle, R"({"variance":"bucket","by":"label"})", &cmp.s, err,
                       kBuf) == FV_OK);
    CHECK(json::parse(cmp.s)["variance_method"] == "bucket");

    Str wink;
    REQUIRE(fv_winkler(p.handle, "{}", &wink.s, err, kBuf) == FV_OK);
    json wj = json::parse(wink.s);
    CHECK(wj["skipped"] == 0);

    Str skill;
    REQUIRE(fv_skill(p.handle, "{}", &skill.s, err, kBuf) == FV_OK);
    CHECK(json::parse(skill.s).contains("estimate"));

    Str rel_json, rel_csv;
    REQUIRE(fv_reliability(p.handle, R"({"bins":[0,0.5,1],"naive":true})",
                           &rel_json.s, &rel_csv.s, err, kBuf) == FV_OK);
    json rj = json::parse(rel_json.s);
    CHECK(rj["bins"].size() == 2);
    CHECK(std::string(rel_csv.s).rfind(
              "bin_mid,y_bar,ci_lo,ci_hi,naive_lo,naive_hi,n_j\n", 0) == 0);
}

TEST_CASE("simulate and verify entry points") {
    char err[kBuf] = {0};
    Str out, csv;
    REQUIRE(fv_simulate(R"({"scenario":2,"runs":20,"seed":7,"emit":"table2"})",
                        &out.s, nullptr, err, kBuf) == FV_OK);
    json j = json::parse(out.s);
    CHECK(j["runs"] == 20);
    CHECK(j["ratio"]["mean"].get<double>() > 0.5);
    CHECK(j["ratio"]["mean"].get<double>() < 1.5);

    Str panel_json, panel_csv;
    REQUIRE(fv_simulate(R"({"scenario":1,"emit":"panel","run":3})", &panel_json.s,
                        &panel_csv.s, err, kBuf) == FV_OK);
    CHECK(std::string(panel_csv.s).rfind("t,k,y,p_hat", 0) == 0);

    CHECK(fv_simulate(R"({"scenario":9})", &out.s, nullptr, err, kBuf) ==
          FV_ERR_VALIDATION);

    Str check_a2, check_eq, check_bad;
    REQUIRE(fv_verify(R"({"check":"a2","p":[0.4],"m":4})", &check_a2.s, err, kBuf) ==
            FV_OK);
    CHECK(json::parse(check_a2.s)["pass"] == true);

    REQUIRE(fv_verify(R"({"check":"eq513","p":[0.2,0.8]})", &check_eq.s, err, kBuf) ==
            FV_OK);
    CHECK(json::parse(check_eq.s)["pass"] == true);

    CHECK(fv_verify(R"({"check":"zzz","p":[0.5]})", &check_bad.s, err, kBuf) ==
          FV_ERR_VALIDATION);
}

TEST_CASE("general-mode panels route compare to the predictand path") {
    char err[kBuf] = {0};
    std::string path = write_temp("capi_general.csv",
                                  "t,y,p_hat,p_hat_alt,bucket\n"
                                  "1,1.5,1.0,0.0,g\n1,2.5,2.0,0.0,g\n"
                                  "1,0.5,1.0,0.0,h\n1,1.0,0.5,0.0,h\n");
    Panel p;
    REQUIRE(fv_panel_load_csv(path.c_str(), nullptr, 1, &p.handle, err, kBuf) == FV_OK);
    Str out;
    REQUIRE(fv_compare(p.handle, R"({"by":"label"})", &out.s, err, kBuf) == FV_OK);
    json j = json::parse(out.s);
    CHECK(j["variance_method"] == "bucket");

    // binary-only operations refuse general panels
    CHECK(fv_score(p.handle, "{}", &out.s, err, kBuf) == FV_ERR_VALIDATION);
}
