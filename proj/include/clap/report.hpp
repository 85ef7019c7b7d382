#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clap/config.hpp"
#include "clap/core.hpp"
#include "clap/metrics.hpp"
#include "clap/segmentation.hpp"
#include "clap/statedetect.hpp"

namespace clap {

using Json = nlohmann::ordered_json;

using StateRuns = std::vector<std::pair<Label, std::size_t>>;

StateRuns run_length_encode(std::span<const Label> states);
Labels run_length_decode(const StateRuns& runs);

struct DetectReport {
  std::string name;
  std::size_t length = 0;
  std::size_t channels = 0;
  std::size_t window_width = 0;
  std::vector<std::size_t> change_points;
  std::size_t num_states = 0;
  StateRuns state_sequence;
  double profile_score = 0.0;
  MergeTrace merge_trace;
  // How change points were accepted, for auditing.
  Validation validation = Validation::Significance;
  double validation_threshold = 0.0;
  double significance_level = 0.0;
  std::vector<SplitDecision> split_decisions;
  // Empty when timing is disabled, so reports can be compared byte for byte.
  std::optional<double> wall_time_seconds;
};

DetectReport make_report(const TimeSeries& ts, const ClapResult& result, const RunConfig& config,
                         std::optional<double> wall_time_seconds);

Json to_json(const DetectReport& report);
// Reads what to_json writes; throws ParseError on missing or mistyped fields.
DetectReport report_from_json(const Json& json);

// One line of an eval or bench table. Numbers are empty on error rows, and
// runtime is empty when timing is disabled. Summary rows carry means and
// standard deviations, so state counts are not integers in general.
struct ScoreRow {
  std::string name;
  std::optional<double> covering;
  std::optional<double> ami;
  std::optional<double> num_states_pred;
  std::optional<double> num_states_true;
  std::optional<double> runtime_s;
  std::string status = "ok";  // "ok", "summary" or "error:<kind>"
  std::string message;        // error text, JSON output only

  bool scored() const { return status == "ok"; }
};

ScoreRow score_row(const ScoreReport& score, std::optional<double> runtime_s);

Json to_json(const ScoreRow& row);

// Fixed header: name,covering,ami,num_states_pred,num_states_true,runtime_s,status
std::string score_csv_header();
std::string to_csv(const ScoreRow& row);

Json error_json(ErrorKind kind, const std::string& message);

}  // namespace clap
