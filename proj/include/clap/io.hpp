#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "clap/core.hpp"

namespace clap {

// CSV with one row per time step and one column per channel. A first row
// that does not parse as numbers is taken as a header. Blank lines are
// skipped. A first column headed t, time or timestamp must increase strictly
// and is dropped. Line numbers in errors are 1-based file lines.
TimeSeries parse_series(std::string_view text, std::string name = "series");
TimeSeries load_series(const std::filesystem::path& path);

// Writes values with round-trip precision, no header.
void write_series(std::ostream& out, const TimeSeries& ts);

struct Annotation {
  std::vector<std::size_t> offsets;  // segment starts, first is 0
  Labels labels;                     // state per segment

  // Throws AnnotationMismatch unless every offset lies inside [0, n).
  Segmentation segmentation(std::size_t n) const;
  StateSequence states(std::size_t n) const;
};

// CSV with header "offset,label" and one row per segment.
Annotation parse_annotation(std::string_view text);
Annotation load_annotation(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace clap
