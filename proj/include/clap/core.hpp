#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clap {

enum class ErrorKind {
  EmptySeries,
  NonFinite,
  SeriesTooShort,
  WidthTooSmall,
  DegenerateLabels,
  LengthMismatch,
  NoWindowsLeft,
  SingleLabel,
  UnknownLabel,
  EmptyInput,
  InvalidSegmentation,
  Io,
  ParseError,
  RaggedRows,
  EmptyFile,
  NonMonotonicOffsets,
  MissingZeroOffset,
  AnnotationMismatch,
  ReportMismatch,
  Config,
};

// Stable snake_case name used in machine-readable error objects.
const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

using Label = int;
using Labels = std::vector<Label>;

/// Ordered, equi-distant sensor observations. Values are stored channel-major
/// so that each channel is a contiguous span.
class TimeSeries {
 public:
  TimeSeries() = default;

  std::size_t length() const { return n_; }
  std::size_t channels() const { return d_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  double at(std::size_t t, std::size_t c) const { return values_[c * n_ + t]; }
  std::span<const double> channel(std::size_t c) const {
    return {values_.data() + c * n_, n_};
  }

  // Builds a series from per-channel vectors; runs the same checks as
  // validate_series.
  static TimeSeries from_channels(const std::vector<std::vector<double>>& channels,
                                  std::string name = "series");

 private:
  friend TimeSeries validate_series(const std::vector<std::vector<double>>& rows,
                                    std::string name);
  std::vector<double> values_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::string name_;
};

/// Interior change points of a series of length n. Segments are the half-open
/// ranges between consecutive boundaries, with 0 and n added virtually.
class Segmentation {
 public:
  Segmentation() = default;
  Segmentation(std::vector<std::size_t> cps, std::size_t n);

  const std::vector<std::size_t>& change_points() const { return cps_; }
  std::size_t length() const { return n_; }
  std::size_t num_segments() const { return cps_.size() + 1; }
  std::size_t segment_begin(std::size_t i) const { return i == 0 ? 0 : cps_[i - 1]; }
  std::size_t segment_end(std::size_t i) const { return i == cps_.size() ? n_ : cps_[i]; }
  // Zero-based index of the segment containing point t.
  std::size_t segment_of(std::size_t t) const;

  bool operator==(const Segmentation&) const = default;

 private:
  std::vector<std::size_t> cps_;
  std::size_t n_ = 0;
};

/// Labelled sliding windows. Window i occupies
/// values[i * width * channels ...] laid out channel-major.
struct WindowDataset {
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<std::size_t> starts;
  Labels labels;
  std::vector<double> values;

  std::size_t size() const { return starts.size(); }
  std::span<const double> window_channel(std::size_t i, std::size_t c) const {
    return {values.data() + (i * channels + c) * width, width};
  }
};

struct LabelProfile {
  Labels labels;
  double score = 0.0;
  std::size_t width = 0;
};

struct StateSequence {
  Labels states;

  std::size_t size() const { return states.size(); }
  bool operator==(const StateSequence&) const = default;
};

struct RngSeed {
  std::uint64_t value = 0;
};

// rows[t][c]; every row must have the same, non-zero number of columns.
TimeSeries validate_series(const std::vector<std::vector<double>>& rows,
                           std::string name = "series");

// Relabels to 1..k in order of first occurrence.
Labels canonicalize_labels(std::span<const Label> labels);

// Number of distinct values.
std::size_t count_distinct(std::span<const Label> labels);

}  // namespace clap
