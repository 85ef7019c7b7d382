#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clap/core.hpp"

namespace clap {

struct SussOptions {
  std::size_t lower_bound = 10;
  // Largest accepted relative score; see suss_distance.
  double threshold = 0.05;
};

struct WidthEstimate {
  std::size_t width = 0;
  std::vector<std::size_t> per_channel;
};

// How far the summary statistics (mean, std, min-max range) of sliding windows
// of the given width are from the whole-channel statistics. The channel is
// min-max scaled first. The per-window Euclidean distance is averaged over all
// windows and divided by sqrt(width), then rescaled so that width 1 scores 1
// and width n-1 scores 0. Zero-range channels score 0.
double suss_distance(std::span<const double> channel, std::size_t width);

// Smallest width in [lower_bound, n/2] whose distance is within threshold,
// found by doubling from lower_bound and then bisecting the last bracket.
std::size_t suss_channel_width(std::span<const double> channel, const SussOptions& options = {});

WidthEstimate suss_width(const TimeSeries& ts, const SussOptions& options = {});

}  // namespace clap
