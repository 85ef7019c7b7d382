#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clap/statedetect.hpp"

namespace clap {

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t kernel_count = 10000;
  std::size_t folds = 5;
  std::size_t max_samples = 1000;
  double suss_threshold = 0.05;
  std::size_t clasp_k = 3;
  Validation validation = Validation::Significance;
  double validation_threshold = 0.75;
  double significance_level = 1e-3;
  std::size_t min_segment_factor = 5;
  std::size_t interval_levels = 4;
  ConfusionMode confusion_mode = ConfusionMode::Rate;
  // Unset means the command's own default (JSON, CSV for bench).
  std::optional<OutputFormat> output_format;

  ClapOptions options() const;
};

// Names of all accepted keys, in documentation order.
const std::vector<std::string>& config_keys();

// Sets one key from its text value. Unknown keys and out-of-range values
// throw a Config error.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Flat "key = value" lines; '#' starts a comment. Later lines override
// earlier ones.
void apply_config_text(RunConfig& config, std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// "key=value" lines for every key, in config_keys() order.
std::string to_config_text(const RunConfig& config);

}  // namespace clap
