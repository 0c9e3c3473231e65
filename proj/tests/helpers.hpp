#ifndef FV_TEST_HELPERS_HPP
#define FV_TEST_HELPERS_HPP

#include <span>
#include <string>
#include <vector>

#include "panel.hpp"

namespace fvtest {

// One bucket cell of a single-period synthetic panel: per-record forecasts,
// a shared true probability, and optionally a competing forecast.
struct CellSpec {
    std::vector<double> p_hat;
    double p_true = 0.5;
    std::vector<double> p_hat_alt; // empty = no competing forecast
};

inline fv::Panel make_panel(const std::vector<CellSpec>& cells,
                            std::span<const double> outcomes) {
    std::vector<fv::ForecastRecord> records;
    std::size_t idx = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t i = 0; i < cells[c].p_hat.size(); ++i, ++idx) {
            fv::ForecastRecord r;
            r.t = 1;
            r.k = static_cast<int>(idx);
            r.y = outcomes[idx];
            r.p_hat = cells[c].p_hat[i];
            if (!cells[c].p_hat_alt.empty())
                r.p_hat_alt = cells[c].p_hat_alt[i];
            r.p_true = cells[c].p_true;
            r.bucket = "c" + std::to_string(c);
            records.push_back(std::move(r));
        }
    }
    return fv::Panel(std::move(records), fv::PanelMode::binary);
}

inline std::vector<std::vector<double>> cell_probs(const std::vector<CellSpec>& cells) {
    std::vector<std::vector<double>> probs;
    for (const auto& c : cells)
        probs.emplace_back(c.p_hat.size(), c.p_true);
    return probs;
}

} // namespace fvtest

#endif
