#include "clap/report.hpp"

#include <cstdio>

namespace clap {

namespace {

const char* validation_name(Validation v) { return v == Validation::Score ? "score" : "significance"; }

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::ParseError, "malformed report: " + what);
}

const Json& field(const Json& json, const char* key) {
  if (!json.is_object() || !json.contains(key)) malformed(std::string("missing field '") + key + "'");
  return json.at(key);
}

template <typename T>
T get(const Json& json, const char* key) {
  try {
    return field(json, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    malformed(std::string("field '") + key + "' has the wrong type");
  }
}

std::string number(std::optional<double> v) {
  if (!v) return "";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12g", *v);
  return buffer;
}

Json optional_number(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

StateRuns run_length_encode(std::span<const Label> states) {
  StateRuns runs;
  for (Label l : states) {
    if (!runs.empty() && runs.back().first == l) {
      ++runs.back().second;
    } else {
      runs.emplace_back(l, 1);
    }
  }
  return runs;
}

Labels run_length_decode(const StateRuns& runs) {
  Labels states;
  for (const auto& [label, length] : runs) states.insert(states.end(), length, label);
  return states;
}

DetectReport make_report(const TimeSeries& ts, const ClapResult& result, const RunConfig& config,
                         std::optional<double> wall_time_seconds) {
  DetectReport report;
  report.name = ts.name();
  report.length = ts.length();
  report.channels = ts.channels();
  report.window_width = result.profile.width;
  report.change_points = result.segmentation.change_points();
  report.num_states = result.num_states;
  report.state_sequence = run_length_encode(result.states.states);
  report.profile_score = result.profile.score;
  report.merge_trace = result.trace;
  report.validation = config.validation;
  report.validation_threshold = config.validation_threshold;
  report.significance_level = config.significance_level;
  report.split_decisions = result.decisions;
  report.wall_time_seconds = wall_time_seconds;
  return report;
}

Json to_json(const DetectReport& report) {
  Json json;
  json["name"] = report.name;
  json["length"] = report.length;
  json["channels"] = report.channels;
  json["window_width"] = report.window_width;
  json["change_points"] = report.change_points;
  json["num_states"] = report.num_states;
  Json runs = Json::array();
  for (const auto& [label, length] : report.state_sequence) runs.push_back(Json::array({label, length}));
  json["state_sequence"] = std::move(runs);
  json["profile_score"] = report.profile_score;
  Json trace = Json::array();
  for (const MergeStep& step : report.merge_trace) {
    trace.push_back({{"kept", step.kept},
                     {"absorbed", step.absorbed},
                     {"score_before", step.score_before},
                     {"score_after", step.score_after}});
  }
  json["merge_trace"] = std::move(trace);
  Json rule;
  rule["validation"] = validation_name(report.validation);
  if (report.validation == Validation::Score) {
    rule["validation_threshold"] = report.validation_threshold;
  } else {
    rule["significance_level"] = report.significance_level;
  }
  Json decisions = Json::array();
  for (const SplitDecision& d : report.split_decisions) {
    decisions.push_back({{"begin", d.begin},
                         {"end", d.end},
                         {"offset", d.offset},
                         {"score", d.score},
                         {"p_value", d.p_value},
                         {"accepted", d.accepted}});
  }
  rule["decisions"] = std::move(decisions);
  json["split_rule"] = std::move(rule);
  json["wall_time_seconds"] = optional_number(report.wall_time_seconds);
  return json;
}

DetectReport report_from_json(const Json& json) {
  DetectReport report;
  report.name = get<std::string>(json, "name");
  report.window_width = get<std::size_t>(json, "window_width");
  report.change_points = get<std::vector<std::size_t>>(json, "change_points");
  report.num_states = get<std::size_t>(json, "num_states");
  for (const Json& run : field(json, "state_sequence")) {
    if (!run.is_array() || run.size() != 2 || !run[0].is_number_integer() || !run[1].is_number_unsigned()) {
      malformed("state_sequence entries must be [label, length] pairs");
    }
    report.state_sequence.emplace_back(run[0].get<Label>(), run[1].get<std::size_t>());
  }
  std::size_t total = 0;
  for (const auto& run : report.state_sequence) total += run.second;
  report.length = json.contains("length") ? get<std::size_t>(json, "length") : total;
  if (total != report.length) malformed("state_sequence covers " + std::to_string(total) + " points, not length");
  report.channels = json.contains("channels") ? get<std::size_t>(json, "channels") : 0;
  report.profile_score = get<double>(json, "profile_score");
  for (const Json& step : field(json, "merge_trace")) {
    report.merge_trace.push_back({get<Label>(step, "kept"), get<Label>(step, "absorbed"),
                                  get<double>(step, "score_before"), get<double>(step, "score_after")});
  }
  const Json& time = field(json, "wall_time_seconds");
  if (time.is_number()) report.wall_time_seconds = time.get<double>();
  return report;
}

ScoreRow score_row(const ScoreReport& score, std::optional<double> runtime_s) {
  ScoreRow row;
  row.name = score.name;
  row.covering = score.covering;
  row.ami = score.ami;
  row.num_states_pred = static_cast<double>(score.num_states_pred);
  row.num_states_true = static_cast<double>(score.num_states_true);
  row.runtime_s = runtime_s;
  return row;
}

Json to_json(const ScoreRow& row) {
  Json json;
  json["name"] = row.name;
  json["covering"] = optional_number(row.covering);
  json["ami"] = optional_number(row.ami);
  json["num_states_pred"] = optional_number(row.num_states_pred);
  json["num_states_true"] = optional_number(row.num_states_true);
  json["runtime_s"] = optional_number(row.runtime_s);
  json["status"] = row.status;
  if (!row.message.empty()) json["message"] = row.message;
  return json;
}

std::string score_csv_header() { return "name,covering,ami,num_states_pred,num_states_true,runtime_s,status"; }

std::string to_csv(const ScoreRow& row) {
  std::string name = row.name;
  if (name.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : name) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    name = quoted + "\"";
  }
  return name + "," + number(row.covering) + "," + number(row.ami) + "," + number(row.num_states_pred) + "," +
         number(row.num_states_true) + "," + number(row.runtime_s) + "," + row.status;
}

Json error_json(ErrorKind kind, const std::string& message) {
  return Json{{"error", {{"kind", error_kind_name(kind)}, {"message", message}}}};
}

}  // namespace clap
