#include "clap/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace clap {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySeries: return "empty_series";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::SeriesTooShort: return "series_too_short";
    case ErrorKind::WidthTooSmall: return "width_too_small";
    case ErrorKind::DegenerateLabels: return "degenerate_labels";
    case ErrorKind::LengthMismatch: return "length_mismatch";
    case ErrorKind::NoWindowsLeft: return "no_windows_left";
    case ErrorKind::SingleLabel: return "single_label";
    case ErrorKind::UnknownLabel: return "unknown_label";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::InvalidSegmentation: return "invalid_segmentation";
    case ErrorKind::Io: return "io";
    case ErrorKind::ParseError: return "parse_error";
    case ErrorKind::RaggedRows: return "ragged_rows";
    case ErrorKind::EmptyFile: return "empty_file";
    case ErrorKind::NonMonotonicOffsets: return "non_monotonic_offsets";
    case ErrorKind::MissingZeroOffset: return "missing_zero_offset";
    case ErrorKind::AnnotationMismatch: return "annotation_mismatch";
    case ErrorKind::ReportMismatch: return "report_mismatch";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

TimeSeries validate_series(const std::vector<std::vector<double>>& rows, std::string name) {
  if (rows.size() < 2 || rows.front().empty()) {
    throw Error(ErrorKind::EmptySeries, "series needs at least 2 rows and 1 column, got " +
                                            std::to_string(rows.size()) + " rows");
  }
  const std::size_t n = rows.size();
  const std::size_t d = rows.front().size();
  TimeSeries ts;
  ts.n_ = n;
  ts.d_ = d;
  ts.name_ = std::move(name);
  ts.values_.resize(n * d);
  for (std::size_t t = 0; t < n; ++t) {
    if (rows[t].size() != d) {
      throw Error(ErrorKind::RaggedRows, "row " + std::to_string(t) + " has " +
                                             std::to_string(rows[t].size()) + " columns, expected " +
                                             std::to_string(d));
    }
    for (std::size_t c = 0; c < d; ++c) {
      const double v = rows[t][c];
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::NonFinite, "non-finite value at row " + std::to_string(t) +
                                              ", column " + std::to_string(c));
      }
      ts.values_[c * n + t] = v;
    }
  }
  return ts;
}

TimeSeries TimeSeries::from_channels(const std::vector<std::vector<double>>& channels,
                                     std::string name) {
  if (channels.empty() || channels.front().size() < 2) {
    throw Error(ErrorKind::EmptySeries, "series needs at least 2 rows and 1 column");
  }
  const std::size_t n = channels.front().size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(channels.size()));
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].size() != n) {
      throw Error(ErrorKind::RaggedRows, "channel " + std::to_string(c) + " has length " +
                                             std::to_string(channels[c].size()));
    }
    for (std::size_t t = 0; t < n; ++t) rows[t][c] = channels[c][t];
  }
  return validate_series(rows, std::move(name));
}

Segmentation::Segmentation(std::vector<std::size_t> cps, std::size_t n)
    : cps_(std::move(cps)), n_(n) {
  for (std::size_t i = 0; i < cps_.size(); ++i) {
    if (cps_[i] < 1 || cps_[i] >= n_ || (i > 0 && cps_[i] <= cps_[i - 1])) {
      throw Error(ErrorKind::InvalidSegmentation,
                  "change points must be strictly increasing within [1, n-1]");
    }
  }
}

std::size_t Segmentation::segment_of(std::size_t t) const {
  return static_cast<std::size_t>(std::upper_bound(cps_.begin(), cps_.end(), t) - cps_.begin());
}

Labels canonicalize_labels(std::span<const Label> labels) {
  std::unordered_map<Label, Label> mapping;
  Labels out;
  out.reserve(labels.size());
  for (Label l : labels) {
    auto [it, inserted] = mapping.try_emplace(l, static_cast<Label>(mapping.size() + 1));
    out.push_back(it->second);
  }
  return out;
}

std::size_t count_distinct(std::span<const Label> labels) {
  Labels sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

}  // namespace clap
