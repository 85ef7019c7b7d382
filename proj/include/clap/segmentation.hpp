#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "clap/core.hpp"

namespace clap {

enum class Validation {
  // Best split must reach validation_threshold macro F1.
  Score,
  // Chi-square test of independence between split labels and predictions.
  Significance,
};

struct ClaspOptions {
  std::size_t neighbours = 3;
  Validation validation = Validation::Significance;
  double validation_threshold = 0.75;
  // Largest accepted p-value in Significance mode. Confusion counts are
  // divided by the window width before testing, since windows one step
  // apart share all but one value.
  double significance_level = 1e-3;
  // Segments shorter than min_segment_factor * width are never produced.
  std::size_t min_segment_factor = 5;
  // Besides the whole range, each range is also searched in sub-intervals of
  // half, quarter, ... its length (half overlapping), so that a change between
  // recurring states is not masked by their repeats elsewhere in the range.
  // 1 searches the whole range only.
  std::size_t interval_levels = 4;
};

struct ClaspProfile {
  // One entry per split offset s in [0, n - w]; NaN marks offsets inside the
  // exclusion margin.
  std::vector<double> scores;
  std::size_t width = 0;

  bool valid(std::size_t offset) const { return !std::isnan(scores[offset]); }
  // Highest valid score; ties go to the lower offset.
  std::optional<std::size_t> best_offset() const;
};

// k nearest neighbours of every window of the given width, excluding windows
// that start fewer than `width` points away. Distance is the sum over
// channels of z-normalised Euclidean distances; a constant window normalises
// to the zero vector. Rows list neighbours by ascending distance, ties to the
// lower index.
std::vector<std::vector<std::uint32_t>> knn_windows(std::span<const std::span<const double>> channels,
                                                    std::size_t width, std::size_t k);

// Scores every split of the window index range from shared neighbour lists.
std::vector<double> profile_from_neighbours(const std::vector<std::vector<std::uint32_t>>& neighbours,
                                            std::size_t length, std::size_t width,
                                            const ClaspOptions& options);

using SplitConfusion = std::array<std::array<std::int64_t, 2>, 2>;

// Confusion of split labels (row) against neighbour-vote predictions (column)
// for windows [0, split) = class 0 and [split, m) = class 1.
SplitConfusion split_confusion(const std::vector<std::vector<std::uint32_t>>& neighbours,
                               std::size_t split);

// Chi-square statistic (1 degree of freedom) of the confusion counts scaled
// by 1/width, and its p-value.
double split_chi_square(const SplitConfusion& confusion, std::size_t width);
// p-value of the chi-square independence test (1 degree of freedom) on the
// confusion counts scaled by 1/width.
double split_p_value(const SplitConfusion& confusion, std::size_t width);

bool split_is_valid(double score, const SplitConfusion& confusion, std::size_t width,
                    const ClaspOptions& options);

ClaspProfile clasp_profile(const TimeSeries& ts, std::size_t width, const ClaspOptions& options = {});

// One evaluated range of the recursive search.
struct SplitDecision {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t offset = 0;  // absolute position of the best split
  double score = 0.0;
  double p_value = 1.0;
  bool accepted = false;
};

// Intervals searched for a split of [begin, end), the whole range first.
std::vector<std::pair<std::size_t, std::size_t>> search_intervals(std::size_t begin, std::size_t end,
                                                                  std::size_t width,
                                                                  const ClaspOptions& options);

// Recursive binary splitting: the strongest split over the search intervals
// of a range becomes a change point if it passes validation, and both sides
// are searched again.
// Ranges shorter than two minimum segments are not evaluated. When
// `decisions` is given, every evaluated range is appended to it.
Segmentation extract_cps(const TimeSeries& ts, std::size_t width, const ClaspOptions& options = {},
                         std::vector<SplitDecision>* decisions = nullptr);

}  // namespace clap
