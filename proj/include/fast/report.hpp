#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fast/simulation.hpp"

namespace fast {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kResultsSchemaVersion = "1";

// Malformed or incomplete results file.
class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column names of results.csv, in order.
const std::vector<std::string>& results_columns();

/// Writes the header plus one row per cell. Probabilities use fixed notation
/// with six fractional digits.
void write_results_csv(std::ostream& out, std::span<const OperatingCharacteristics> rows);

struct ResultRow {
  std::string scenario_id;
  int n_drop = 0;
  int n_feas = 0;
  std::string order_first;
  double p_retain_correct = 0.0;
  double p_proceed = 0.0;
  double power = 0.0;
  double fwer = 0.0;
};

/// Parses results.csv. Throws ReportError naming the first missing column or
/// the offending line.
std::vector<ResultRow> read_results_csv(std::istream& in);

/// One row per scenario, three heatmap panels per row (retain-correct,
/// proceed, power); x = n_drop, y = n_feas; every cell carries its value.
std::string render_heatmaps_svg(std::span<const ResultRow> rows);

const std::vector<std::string>& trace_columns();
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, std::string_view scenario_id, std::uint64_t replicate,
                     const TrialResult& result);

/// Hash of the canonical JSON form of the scenarios; insensitive to key
/// order and whitespace in the source file.
std::string config_hash(std::span<const ScenarioConfig> scenarios);

struct RunManifest {
  std::string config_hash;
  std::vector<std::pair<std::string, std::uint64_t>> base_seeds;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  unsigned threads = 1;
  long replicates_effective = 0;
  long replicates_failed = 0;
  long clamped_draws = 0;
  long gating_violations = 0;

  nlohmann::json to_json() const;
};

/// Current UTC time, ISO-8601.
std::string utc_timestamp();

}  // namespace fast
