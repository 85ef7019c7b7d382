#include "clap/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "clap/io.hpp"

namespace clap {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void reject(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorKind::Config, "invalid value '" + std::string(value) + "' for " + std::string(key) +
                                     ": expected " + std::string(expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, std::string_view expected) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) reject(key, value, expected);
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view value, std::size_t lo, std::size_t hi) {
  const std::string expected = "an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  const auto v = parse_number<std::size_t>(key, value, expected);
  if (v < lo || v > hi) reject(key, value, expected);
  return v;
}

// Open interval (lo, hi), or half-open (lo, hi] when closed_hi.
double parse_real(std::string_view key, std::string_view value, double lo, double hi, bool closed_hi) {
  std::ostringstream expected;
  expected << "a number in (" << lo << ", " << hi << (closed_hi ? "]" : ")");
  const auto v = parse_number<double>(key, value, expected.str());
  if (!std::isfinite(v) || !(v > lo) || (closed_hi ? v > hi : v >= hi)) reject(key, value, expected.str());
  return v;
}

std::string format_real(double v) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, end);
}

}  // namespace

ClapOptions RunConfig::options() const {
  ClapOptions o;
  o.suss.threshold = suss_threshold;
  o.clasp.neighbours = clasp_k;
  o.clasp.validation = validation;
  o.clasp.validation_threshold = validation_threshold;
  o.clasp.significance_level = significance_level;
  o.clasp.min_segment_factor = min_segment_factor;
  o.clasp.interval_levels = interval_levels;
  o.dataset.max_samples = max_samples;
  o.kernel_count = kernel_count;
  o.folds = folds;
  o.merge.confusion = confusion_mode;
  return o;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "seed", "kernel_count", "folds", "max_samples", "suss_threshold", "clasp_k", "validation",
      "validation_threshold", "significance_level", "min_segment_factor", "interval_levels", "confusion_mode",
      "output_format"};
  return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value, "a non-negative 64-bit integer");
  } else if (key == "kernel_count") {
    config.kernel_count = parse_count(key, value, 1, 100000);
  } else if (key == "folds") {
    config.folds = parse_count(key, value, 2, 20);
  } else if (key == "max_samples") {
    config.max_samples = parse_count(key, value, 10, 1000000);
  } else if (key == "suss_threshold") {
    config.suss_threshold = parse_real(key, value, 0.0, 1.0, false);
  } else if (key == "clasp_k") {
    config.clasp_k = parse_count(key, value, 1, 15);
  } else if (key == "validation") {
    if (value == "significance") {
      config.validation = Validation::Significance;
    } else if (value == "score") {
      config.validation = Validation::Score;
    } else {
      reject(key, value, "significance or score");
    }
  } else if (key == "validation_threshold") {
    config.validation_threshold = parse_real(key, value, 0.0, 1.0, true);
  } else if (key == "significance_level") {
    config.significance_level = parse_real(key, value, 0.0, 1.0, false);
  } else if (key == "min_segment_factor") {
    config.min_segment_factor = parse_count(key, value, 1, 100);
  } else if (key == "interval_levels") {
    config.interval_levels = parse_count(key, value, 1, 8);
  } else if (key == "confusion_mode") {
    if (value == "rate") {
      config.confusion_mode = ConfusionMode::Rate;
    } else if (value == "count") {
      config.confusion_mode = ConfusionMode::Count;
    } else {
      reject(key, value, "rate or count");
    }
  } else if (key == "output_format") {
    if (value == "json") {
      config.output_format = OutputFormat::Json;
    } else if (value == "csv") {
      config.output_format = OutputFormat::Csv;
    } else {
      reject(key, value, "json or csv");
    }
  } else {
    throw Error(ErrorKind::Config, "unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Config, "config line " + std::to_string(number) + " is not key=value");
    }
    try {
      apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, "config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig config;
  apply_config_text(config, read_file(path));
  return config;
}

std::string to_config_text(const RunConfig& config) {
  std::ostringstream out;
  out << "seed=" << config.seed << '\n'
      << "kernel_count=" << config.kernel_count << '\n'
      << "folds=" << config.folds << '\n'
      << "max_samples=" << config.max_samples << '\n'
      << "suss_threshold=" << format_real(config.suss_threshold) << '\n'
      << "clasp_k=" << config.clasp_k << '\n'
      << "validation=" << (config.validation == Validation::Score ? "score" : "significance") << '\n'
      << "validation_threshold=" << format_real(config.validation_threshold) << '\n'
      << "significance_level=" << format_real(config.significance_level) << '\n'
      << "min_segment_factor=" << config.min_segment_factor << '\n'
      << "interval_levels=" << config.interval_levels << '\n'
      << "confusion_mode=" << (config.confusion_mode == ConfusionMode::Count ? "count" : "rate") << '\n';
  if (config.output_format) {
    out << "output_format=" << (*config.output_format == OutputFormat::Csv ? "csv" : "json") << '\n';
  }
  return out.str();
}

}  // namespace clap
