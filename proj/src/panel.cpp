#include "panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "stats.hpp"

namespace fv {

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string record_key(const ForecastRecord& r) {
    return "(t=" + std::to_string(r.t) + ", k=" + std::to_string(r.k) + ")";
}

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

} // namespace

const char* to_string(ForecastField field) {
    switch (field) {
    case ForecastField::p_hat:
        return "p_hat";
    case ForecastField::p_hat_alt:
        return "p_hat_alt";
    case ForecastField::p_clim:
        return "p_clim";
    }
    return "?";
}

Panel::Panel(std::vector<ForecastRecord> records, PanelMode mode)
    : records_(std::move(records)), mode_(mode) {
    std::stable_sort(records_.begin(), records_.end(),
                     [](const ForecastRecord& a, const ForecastRecord& b) {
                         return a.t != b.t ? a.t < b.t : a.k < b.k;
                     });

    int last_t = -1;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const ForecastRecord& r = records_[i];
        if (r.t < 0 || r.k < 0)
            throw ValidationError("record " + record_key(r) + ": negative index");
        if (i > 0 && records_[i - 1].t == r.t && records_[i - 1].k == r.k)
            throw DuplicateKeyError("duplicate record key " + record_key(r));
        if (mode_ == PanelMode::binary && r.y != 0.0 && r.y != 1.0)
            throw ValidationError("record " + record_key(r) +
                                  ": outcome must be 0 or 1 in binary mode, got " +
                                  format_value(r.y));
        auto check_prob = [&](double v, const char* what) {
            if (!is_probability(v))
                throw ValidationError("record " + record_key(r) + ": " + what +
                                      " out of [0, 1]: " + format_value(v));
        };
        if (mode_ == PanelMode::binary) {
            check_prob(r.p_hat, "p_hat");
            if (r.p_hat_alt)
                check_prob(*r.p_hat_alt, "p_hat_alt");
            if (r.p_clim)
                check_prob(*r.p_clim, "p_clim");
            if (r.p_true)
                check_prob(*r.p_true, "p_true");
        }
        all_alt_ = all_alt_ && r.p_hat_alt.has_value();
        all_clim_ = all_clim_ && r.p_clim.has_value();
        all_bucket_ = all_bucket_ && r.bucket.has_value();
        all_true_ = all_true_ && r.p_true.has_value();
        if (r.t != last_t) {
            ++period_count_;
            last_t = r.t;
        }
    }
}

double Panel::field(std::size_t i, ForecastField f) const {
    const ForecastRecord& r = records_[i];
    switch (f) {
    case ForecastField::p_hat:
        return r.p_hat;
    case ForecastField::p_hat_alt:
        if (!r.p_hat_alt)
            throw MissingFieldError("record " + record_key(r) + " lacks p_hat_alt");
        return *r.p_hat_alt;
    case ForecastField::p_clim:
        if (!r.p_clim)
            throw MissingFieldError("record " + record_key(r) + " lacks p_clim");
        return *r.p_clim;
    }
    throw MissingFieldError("unknown field");
}

void Panel::require_field(ForecastField f) const {
    bool ok = true;
    switch (f) {
    case ForecastField::p_hat:
        ok = true;
        break;
    case ForecastField::p_hat_alt:
        ok = all_alt_;
        break;
    case ForecastField::p_clim:
        ok = all_clim_;
        break;
    }
    if (!ok || records_.empty())
        throw MissingFieldError(records_.empty()
                                    ? "panel is empty"
                                    : std::string("panel lacks ") + to_string(f) +
                                          " on some records");
}

namespace {

struct CsvLayout {
    // column index per canonical name, -1 when absent
    int t = -1, k = -1, y = -1, p_hat = -1, p_hat_alt = -1, p_clim = -1,
        bucket = -1, p_true = -1;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        std::size_t b = f.find_first_not_of(" \t");
        std::size_t e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

double parse_double(const std::string& s, std::size_t line_no, const char* what) {
    double v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " +
                         std::string(what) + " value '" + s + "'");
    return v;
}

int parse_index(const std::string& s, std::size_t line_no, const char* what) {
    int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
        throw ParseError("line " + std::to_string(line_no) + ": " + std::string(what) +
                         " must be a non-negative integer, got '" + s + "'");
    return v;
}

} // namespace

Panel load_csv(std::istream& in, const ColumnMap& columns, PanelMode mode,
               const std::string& source) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(source + ": empty file, header row required");

    auto header_for = [&](const char* canonical) {
        auto it = columns.find(canonical);
        return it == columns.end() ? std::string(canonical) : it->second;
    };

    std::vector<std::string> headers = split_csv_line(line);
    CsvLayout layout;
    auto locate = [&](const char* canonical) {
        std::string want = header_for(canonical);
        for (std::size_t i = 0; i < headers.size(); ++i)
            if (headers[i] == want)
                return static_cast<int>(i);
        return -1;
    };
    layout.t = locate("t");
    layout.k = locate("k");
    layout.y = locate("y");
    layout.p_hat = locate("p_hat");
    layout.p_hat_alt = locate("p_hat_alt");
    layout.p_clim = locate("p_clim");
    layout.bucket = locate("bucket");
    layout.p_true = locate("p_true");
    if (layout.t < 0 || layout.y < 0 || layout.p_hat < 0)
        throw ParseError(source + ": required columns t, y, p_hat not all present");

    std::vector<ForecastRecord> records;
    std::map<int, int> next_k; // auto-assigned item index per period
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        std::vector<std::string> fields = split_csv_line(line);
        auto cell = [&](int idx) -> const std::string& {
            static const std::string empty;
            if (idx < 0 || idx >= static_cast<int>(fields.size()))
                return empty;
            return fields[idx];
        };

        ForecastRecord r;
        r.t = parse_index(cell(layout.t), line_no, "t");
        if (layout.k >= 0 && !cell(layout.k).empty())
            r.k = parse_index(cell(layout.k), line_no, "k");
        else
            r.k = next_k[r.t]++;
        r.y = parse_double(cell(layout.y), line_no, "y");
        r.p_hat = parse_double(cell(layout.p_hat), line_no, "p_hat");
        if (layout.p_hat_alt >= 0 && !cell(layout.p_hat_alt).empty())
            r.p_hat_alt = parse_double(cell(layout.p_hat_alt), line_no, "p_hat_alt");
        if (layout.p_clim >= 0 && !cell(layout.p_clim).empty())
            r.p_clim = parse_double(cell(layout.p_clim), line_no, "p_clim");
        if (layout.p_true >= 0 && !cell(layout.p_true).empty())
            r.p_true = parse_double(cell(layout.p_true), line_no, "p_true");
        if (layout.bucket >= 0 && !cell(layout.bucket).empty())
            r.bucket = cell(layout.bucket);
        records.push_back(std::move(r));
    }
    return Panel(std::move(records), mode);
}

Panel load_csv(const std::string& path, const ColumnMap& columns, PanelMode mode) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open file: " + path);
    return load_csv(in, columns, mode, path);
}

void write_csv(const Panel& panel, std::ostream& out) {
    bool any_alt = false, any_clim = false, any_bucket = false, any_true = false;
    for (const auto& r : panel.records()) {
        any_alt |= r.p_hat_alt.has_value();
        any_clim |= r.p_clim.has_value();
        any_bucket |= r.bucket.has_value();
        any_true |= r.p_true.has_value();
    }
    out << "t,k,y,p_hat";
    if (any_alt)
        out << ",p_hat_alt";
    if (any_clim)
        out << ",p_clim";
    if (any_bucket)
        out << ",bucket";
    if (any_true)
        out << ",p_true";
    out << "\n";
    for (const auto& r : panel.records()) {
        out << r.t << ',' << r.k << ',' << format_value(r.y) << ','
            << format_value(r.p_hat);
        if (any_alt)
            out << ',' << (r.p_hat_alt ? format_value(*r.p_hat_alt) : std::string());
        if (any_clim)
            out << ',' << (r.p_clim ? format_value(*r.p_clim) : std::string());
        if (any_bucket)
            out << ',' << (r.bucket ? *r.bucket : std::string());
        if (any_true)
            out << ',' << (r.p_true ? format_value(*r.p_true) : std::string());
        out << "\n";
    }
}

std::string write_csv(const Panel& panel) {
    std::ostringstream out;
    write_csv(panel, out);
    return out.str();
}

double climatology_from_history(std::span<const double> outcomes) {
    if (outcomes.empty())
        throw EmptyHistoryError("climatology needs at least one outcome");
    double ones = 0.0;
    for (double y : outcomes) {
        if (y != 0.0 && y != 1.0)
            throw ValidationError("climatology history must be 0/1");
        ones += y;
    }
    return ones / static_cast<double>(outcomes.size());
}

BucketPartition BucketPartition::by_label(const Panel& panel) {
    std::vector<std::string> missing;
    for (const auto& r : panel.records())
        if (!r.bucket)
            missing.push_back(record_key(r));
    if (!missing.empty()) {
        std::string msg = "records missing bucket label:";
        for (std::size_t i = 0; i < missing.size() && i < 8; ++i)
            msg += " " + missing[i];
        if (missing.size() > 8)
            msg += " and " + std::to_string(missing.size() - 8) + " more";
        throw MissingLabelError(msg);
    }

    std::map<std::pair<int, std::string>, std::vector<std::uint32_t>> grouped;
    for (std::size_t i = 0; i < panel.size(); ++i)
        grouped[{panel[i].t, *panel[i].bucket}].push_back(
            static_cast<std::uint32_t>(i));

    BucketPartition part;
    part.cell_of_.assign(panel.size(), kNoCell);
    part.min_size_ = panel.size();
    for (auto& [key, idx] : grouped) {
        for (std::uint32_t i : idx)
            part.cell_of_[i] = static_cast<std::uint32_t>(part.cells_.size());
        part.total_ += idx.size();
        part.min_size_ = std::min(part.min_size_, idx.size());
        part.cells_.push_back(BucketCell{key.first, key.second, -1, std::move(idx)});
    }
    if (part.cells_.empty())
        part.min_size_ = 0;
    return part;
}

std::string BucketPartition::bin_label(std::span<const double> edges, int j) {
    char buf[64];
    bool last = j + 2 == static_cast<int>(edges.size());
    std::snprintf(buf, sizeof(buf), "[%g,%g%c", edges[j], edges[j + 1],
                  last ? ']' : ')');
    return buf;
}

BucketPartition BucketPartition::by_bins(const Panel& panel,
                                         std::span<const double> edges,
                                         ForecastField field) {
    if (edges.size() < 2)
        throw InvalidBinsError("need at least two bin edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw InvalidBinsError("bin edges must be strictly increasing");
    if (edges.front() != 0.0 || edges.back() != 1.0)
        throw InvalidBinsError("bin edges must span [0, 1]");
    panel.require_field(field);

    const int bins = static_cast<int>(edges.size()) - 1;
    // Bin membership depends on forecasts only, never on outcomes.
    std::map<std::pair<int, int>, std::vector<std::uint32_t>> grouped;
    for (std::size_t i = 0; i < panel.size(); ++i) {
        double x = panel.field(i, field);
        if (x < edges.front() || x > edges.back())
            throw InvalidBinsError("record (t=" + std::to_string(panel[i].t) +
                                   ", k=" + std::to_string(panel[i].k) +
                                   ") has forecast outside the bin range");
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        int j = static_cast<int>(it - edges.begin()) - 1;
        if (j >= bins)
            j = bins - 1; // x == 1 falls in the closed last bin
        grouped[{panel[i].t, j}].push_back(static_cast<std::uint32_t>(i));
    }

    BucketPartition part;
    part.edges_.assign(edges.begin(), edges.end());
    part.cell_of_.assign(panel.size(), kNoCell);
    part.min_size_ = panel.size();
    for (auto& [key, idx] : grouped) {
        for (std::uint32_t i : idx)
            part.cell_of_[i] = static_cast<std::uint32_t>(part.cells_.size());
        part.total_ += idx.size();
        part.min_size_ = std::min(part.min_size_, idx.size());
        part.cells_.push_back(BucketCell{key.first, bin_label(edges, key.second),
                                         key.second, std::move(idx)});
    }
    if (part.cells_.empty())
        part.min_size_ = 0;
    return part;
}

} // namespace fv
