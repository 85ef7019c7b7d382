#include "clap/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace clap {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Lines with their 1-based line numbers, blank lines dropped.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t end = text.find('\n');
    const std::string_view line = text.substr(0, end);
    if (!trim(line).empty()) lines.emplace_back(number, line);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
  return lines;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename Int>
bool parse_integer(std::string_view s, Int& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

bool is_time_column(std::string_view header) {
  std::string lower;
  for (char c : header) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "t" || lower == "time" || lower == "timestamp";
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return buffer.str();
}

TimeSeries parse_series(std::string_view text, std::string name) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorKind::EmptyFile, "series file has no rows");

  std::size_t first = 0;
  {
    double ignored = 0.0;
    for (auto field : split_fields(lines.front().second)) {
      if (!parse_double(field, ignored)) {
        first = 1;
        break;
      }
    }
  }
  if (first == lines.size()) throw Error(ErrorKind::EmptyFile, "series file has a header but no rows");

  const std::size_t columns = split_fields(lines[first].second).size();
  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size() - first);
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto [number, line] = lines[i];
    const auto fields = split_fields(line);
    if (fields.size() != columns) {
      throw Error(ErrorKind::RaggedRows, "line " + std::to_string(number) + " has " +
                                             std::to_string(fields.size()) + " columns, expected " +
                                             std::to_string(columns));
    }
    std::vector<double> row(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      if (!parse_double(fields[c], row[c])) {
        throw Error(ErrorKind::ParseError,
                    "cannot parse '" + std::string(fields[c]) + "' as a number at " + where(number, c + 1));
      }
    }
    rows.push_back(std::move(row));
  }

  if (first == 1 && columns > 1 && is_time_column(split_fields(lines.front().second).front())) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (!(rows[r][0] > rows[r - 1][0])) {
        throw Error(ErrorKind::ParseError, "time column is not strictly increasing at line " +
                                               std::to_string(lines[first + r].first));
      }
    }
    for (auto& row : rows) row.erase(row.begin());
  }
  return validate_series(rows, std::move(name));
}

TimeSeries load_series(const std::filesystem::path& path) {
  return parse_series(read_file(path), path.stem().string());
}

void write_series(std::ostream& out, const TimeSeries& ts) {
  char buffer[32];
  for (std::size_t t = 0; t < ts.length(); ++t) {
    for (std::size_t c = 0; c < ts.channels(); ++c) {
      if (c > 0) out << ',';
      const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, ts.at(t, c));
      out.write(buffer, end - buffer);
    }
    out << '\n';
  }
}

Annotation parse_annotation(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorKind::EmptyFile, "annotation file is empty");
  const auto header = split_fields(lines.front().second);
  if (header.size() != 2 || header[0] != "offset" || header[1] != "label") {
    throw Error(ErrorKind::ParseError, "annotation header must be 'offset,label' (line " +
                                           std::to_string(lines.front().first) + ")");
  }
  if (lines.size() == 1) throw Error(ErrorKind::EmptyFile, "annotation file has no segments");

  Annotation annotation;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [number, line] = lines[i];
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(number) + " needs 2 fields, has " +
                                             std::to_string(fields.size()));
    }
    std::size_t offset = 0;
    Label label = 0;
    if (!parse_integer(fields[0], offset)) {
      throw Error(ErrorKind::ParseError, "cannot parse offset '" + std::string(fields[0]) + "' at " +
                                             where(number, 1));
    }
    if (!parse_integer(fields[1], label)) {
      throw Error(ErrorKind::ParseError, "cannot parse label '" + std::string(fields[1]) + "' at " +
                                             where(number, 2));
    }
    if (annotation.offsets.empty() && offset != 0) {
      throw Error(ErrorKind::MissingZeroOffset,
                  "first segment starts at " + std::to_string(offset) + ", not 0 (line " +
                      std::to_string(number) + ")");
    }
    if (!annotation.offsets.empty() && offset <= annotation.offsets.back()) {
      throw Error(ErrorKind::NonMonotonicOffsets,
                  "offset " + std::to_string(offset) + " on line " + std::to_string(number) +
                      " does not exceed the previous offset " + std::to_string(annotation.offsets.back()));
    }
    annotation.offsets.push_back(offset);
    annotation.labels.push_back(label);
  }
  return annotation;
}

Annotation load_annotation(const std::filesystem::path& path) { return parse_annotation(read_file(path)); }

Segmentation Annotation::segmentation(std::size_t n) const {
  if (offsets.empty() || offsets.back() >= n) {
    throw Error(ErrorKind::AnnotationMismatch,
                "annotation offset " + std::to_string(offsets.empty() ? 0 : offsets.back()) +
                    " lies outside a series of length " + std::to_string(n));
  }
  return Segmentation(std::vector<std::size_t>(offsets.begin() + 1, offsets.end()), n);
}

StateSequence Annotation::states(std::size_t n) const {
  const Segmentation seg = segmentation(n);
  Labels states;
  states.reserve(n);
  for (std::size_t s = 0; s < seg.num_segments(); ++s) {
    states.insert(states.end(), seg.segment_end(s) - seg.segment_begin(s), labels[s]);
  }
  return StateSequence{std::move(states)};
}

}  // namespace clap
