#include "clap/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "clap/metrics.hpp"
#include "clap/rng.hpp"

namespace clap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

ScoreRow error_row(std::string name, ErrorKind kind, const std::string& message) {
  ScoreRow row;
  row.name = std::move(name);
  row.status = std::string("error:") + error_kind_name(kind);
  row.message = message;
  return row;
}

ScoreRow bench_one(const ManifestEntry& entry, const RunConfig& config, const RunFlags& flags) {
  const std::string name = entry.series.stem().string();
  try {
    const TimeSeries ts = load_series(entry.series);
    const Annotation truth = load_annotation(entry.annotation);
    return run_eval(ts, truth, config, derive_seed(RngSeed{config.seed}, name), flags);
  } catch (const Error& e) {
    return error_row(name, e.kind(), e.what());
  } catch (const std::exception& e) {
    ScoreRow row = error_row(name, ErrorKind::Io, e.what());
    row.status = "error:internal";
    return row;
  }
}

// Mean and population standard deviation of one column over scored rows.
std::pair<std::optional<double>, std::optional<double>> summarize(
    const std::vector<ScoreRow>& rows, std::optional<double> ScoreRow::*column) {
  std::vector<double> values;
  for (const ScoreRow& row : rows) {
    if (row.scored() && row.*column) values.push_back(*(row.*column));
  }
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

}  // namespace

DetectReport run_detect(const TimeSeries& ts, const RunConfig& config, RngSeed seed, const RunFlags& flags) {
  const auto start = Clock::now();
  const ClapResult result = clap(ts, seed, config.options());
  const double elapsed = seconds_since(start);
  return make_report(ts, result, config, flags.timing ? std::optional<double>(elapsed) : std::nullopt);
}

ScoreRow run_eval(const TimeSeries& ts, const Annotation& truth, const RunConfig& config, RngSeed seed,
                  const RunFlags& flags) {
  const Segmentation true_segments = truth.segmentation(ts.length());
  const StateSequence true_states = truth.states(ts.length());

  const auto start = Clock::now();
  const ClapResult result = clap(ts, seed, config.options());
  const double elapsed = seconds_since(start);

  ScoreReport score;
  score.name = ts.name();
  score.covering = covering(true_segments, result.segmentation);
  score.ami = ami(true_states.states, result.states.states);
  score.num_states_pred = result.num_states;
  score.num_states_true = count_distinct(true_states.states);
  return score_row(score, flags.timing ? std::optional<double>(elapsed) : std::nullopt);
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base) {
  std::vector<ManifestEntry> entries;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorKind::ParseError,
                  "manifest line " + std::to_string(number) + " must be 'series_path,annotation_path'");
    }
    auto resolve = [&](std::string_view p) {
      std::filesystem::path path{std::string(trim(p))};
      return path.is_absolute() ? path : base / path;
    };
    entries.push_back({resolve(line.substr(0, comma)), resolve(line.substr(comma + 1))});
  }
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

BenchResult run_bench(const std::vector<ManifestEntry>& entries, const RunConfig& config, const RunFlags& flags) {
  BenchResult result;
  result.rows.resize(entries.size());
  const std::size_t jobs = std::max<std::size_t>(1, std::min(flags.jobs, entries.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) result.rows[i] = bench_one(entries[i], config, flags);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t j = 0; j < jobs; ++j) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
          result.rows[i] = bench_one(entries[i], config, flags);
        }
      });
    }
  }

  result.mean.name = "mean";
  result.std.name = "std";
  result.mean.status = result.std.status = "summary";
  for (auto column : {&ScoreRow::covering, &ScoreRow::ami, &ScoreRow::num_states_pred,
                      &ScoreRow::num_states_true, &ScoreRow::runtime_s}) {
    const auto [mean, sd] = summarize(result.rows, column);
    result.mean.*column = mean;
    result.std.*column = sd;
  }
  return result;
}

std::string to_csv(const BenchResult& result) {
  std::ostringstream out;
  out << score_csv_header() << '\n';
  for (const ScoreRow& row : result.rows) out << to_csv(row) << '\n';
  out << to_csv(result.mean) << '\n' << to_csv(result.std) << '\n';
  return out.str();
}

Json to_json(const BenchResult& result) {
  Json rows = Json::array();
  for (const ScoreRow& row : result.rows) rows.push_back(to_json(row));
  return Json{{"rows", std::move(rows)}, {"mean", to_json(result.mean)}, {"std", to_json(result.std)}};
}

}  // namespace clap
