#ifndef FV_SERIALIZE_HPP
#define FV_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "buckets.hpp"
#include "oracle.hpp"
#include "reliability.hpp"
#include "report.hpp"
#include "sim.hpp"

namespace fv {

// All emitted numbers use %.17g so reports are reproducible byte for byte
// and round-trip to the exact double.
std::string format_double17(double v);

// Serializes with insertion order preserved and %.17g floats; `indent` < 0
// gives the compact form.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

nlohmann::ordered_json to_json(const EvalReport& report);
nlohmann::ordered_json to_json(const CellStats& cell);
nlohmann::ordered_json to_json(const ReliabilityBin& bin, bool include_naive);
nlohmann::ordered_json to_json(const oracle::CheckResult& check);

std::string reliability_plot_csv(const std::vector<ReliabilityBin>& bins);

// Simulation summary views; `emit` selects among table2, table3, qq,
// coverage. Plot-ready CSV for qq.
nlohmann::ordered_json summary_table2_json(const sim::MonteCarloSummary& s);
nlohmann::ordered_json summary_table3_json(const sim::MonteCarloSummary& s);
nlohmann::ordered_json summary_coverage_json(const sim::MonteCarloSummary& s);
nlohmann::ordered_json summary_qq_json(const sim::MonteCarloSummary& s);
std::string qq_plot_csv(const sim::MonteCarloSummary& s);

} // namespace fv

#endif
