#ifndef FV_PANEL_HPP
#define FV_PANEL_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fv {

enum class PanelMode { binary, general };

// One (period, item) observation: outcome, primary forecast, and the
// optional companions (competing forecast, climatology, bucket label,
// simulation ground truth).
struct ForecastRecord {
    int t = 0;
    int k = 0;
    double y = 0.0;
    double p_hat = 0.0;
    std::optional<double> p_hat_alt;
    std::optional<double> p_clim;
    std::optional<double> p_true;
    std::optional<std::string> bucket;
};

enum class ForecastField { p_hat, p_hat_alt, p_clim };

const char* to_string(ForecastField field);

// Immutable, (t, k)-sorted collection of records.
class Panel {
public:
    Panel(std::vector<ForecastRecord> records, PanelMode mode);

    PanelMode mode() const { return mode_; }
    std::size_t size() const { return records_.size(); }
    int period_count() const { return period_count_; } // non-empty periods only
    const std::vector<ForecastRecord>& records() const { return records_; }
    const ForecastRecord& operator[](std::size_t i) const { return records_[i]; }

    bool all_have_alt() const { return all_alt_; }
    bool all_have_clim() const { return all_clim_; }
    bool all_have_bucket() const { return all_bucket_; }
    bool all_have_true() const { return all_true_; }

    // Forecast value of a field, throwing MissingFieldError when absent.
    double field(std::size_t i, ForecastField f) const;
    void require_field(ForecastField f) const;

private:
    std::vector<ForecastRecord> records_;
    PanelMode mode_;
    int period_count_ = 0;
    bool all_alt_ = true, all_clim_ = true, all_bucket_ = true, all_true_ = true;
};

// Optional renaming of CSV headers: canonical name -> header in the file.
using ColumnMap = std::map<std::string, std::string>;

Panel load_csv(const std::string& path, const ColumnMap& columns = {},
               PanelMode mode = PanelMode::binary);
Panel load_csv(std::istream& in, const ColumnMap& columns = {},
               PanelMode mode = PanelMode::binary, const std::string& source = "<stream>");

void write_csv(const Panel& panel, std::ostream& out);
std::string write_csv(const Panel& panel);

// Historic relative frequency of the event over a 0/1 history.
double climatology_from_history(std::span<const double> outcomes);

struct BucketCell {
    int t = 0;
    std::string label;
    int bin_index = -1; // -1 for label-based partitions
    std::vector<std::uint32_t> indices;
};

// Assignment of records to (period, bucket) cells. Cells are ordered by
// (t, label) for label partitions and (t, bin) for bin partitions, fixing
// every downstream summation order.
class BucketPartition {
public:
    static BucketPartition by_label(const Panel& panel);
    static BucketPartition by_bins(const Panel& panel, std::span<const double> edges,
                                   ForecastField field = ForecastField::p_hat);

    const std::vector<BucketCell>& cells() const { return cells_; }
    std::size_t total() const { return total_; }
    std::size_t min_cell_size() const { return min_size_; }

    static constexpr std::uint32_t kNoCell = 0xFFFFFFFFu;
    std::uint32_t cell_of(std::size_t record_index) const { return cell_of_[record_index]; }

    bool from_bins() const { return !edges_.empty(); }
    const std::vector<double>& bin_edges() const { return edges_; }
    int bin_count() const { return edges_.empty() ? 0 : static_cast<int>(edges_.size()) - 1; }
    static std::string bin_label(std::span<const double> edges, int j);

private:
    std::vector<BucketCell> cells_;
    std::vector<std::uint32_t> cell_of_;
    std::vector<double> edges_;
    std::size_t total_ = 0;
    std::size_t min_size_ = 0;
};

} // namespace fv

#endif
