#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clap/config.hpp"
#include "clap/io.hpp"
#include "clap/report.hpp"

namespace clap {

struct RunFlags {
  bool timing = true;
  std::size_t jobs = 1;  // bench only
};

DetectReport run_detect(const TimeSeries& ts, const RunConfig& config, RngSeed seed, const RunFlags& flags = {});

// Throws AnnotationMismatch when the annotation does not fit the series.
ScoreRow run_eval(const TimeSeries& ts, const Annotation& truth, const RunConfig& config, RngSeed seed,
                  const RunFlags& flags = {});

struct ManifestEntry {
  std::filesystem::path series;
  std::filesystem::path annotation;
};

// "series_path,annotation_path" per line, '#' comments. Relative paths are
// taken relative to `base`.
std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct BenchResult {
  std::vector<ScoreRow> rows;  // manifest order
  ScoreRow mean;
  ScoreRow std;                // population standard deviation over scored rows
};

// Dataset failures become error rows. Each dataset runs with the seed derived
// from (config.seed, dataset name), so results do not depend on `jobs`.
BenchResult run_bench(const std::vector<ManifestEntry>& entries, const RunConfig& config,
                      const RunFlags& flags = {});

std::string to_csv(const BenchResult& result);
Json to_json(const BenchResult& result);

}  // namespace clap
