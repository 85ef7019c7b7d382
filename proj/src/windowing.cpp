#include "clap/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace clap {

namespace {

struct Scaled {
  std::vector<double> values;
  bool constant = false;
};

Scaled min_max_scale(std::span<const double> channel) {
  const auto [lo, hi] = std::minmax_element(channel.begin(), channel.end());
  Scaled s;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    s.constant = true;
    return s;
  }
  s.values.reserve(channel.size());
  for (double v : channel) s.values.push_back((v - *lo) / range);
  return s;
}

// Mean over all sliding windows of the Euclidean distance between the
// window's (mean, std, range) and the global triple, divided by sqrt(width).
double raw_score(const std::vector<double>& x, std::size_t width) {
  const std::size_t n = x.size();
  const std::size_t windows = n - width + 1;

  double sum = 0.0, sq = 0.0;
  for (double v : x) {
    sum += v;
    sq += v * v;
  }
  const double global_mean = sum / static_cast<double>(n);
  const double global_std =
      std::sqrt(std::max(0.0, sq / static_cast<double>(n) - global_mean * global_mean));
  const double global_range = 1.0;

  std::vector<double> prefix(n + 1, 0.0), prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + x[i];
    prefix_sq[i + 1] = prefix_sq[i] + x[i] * x[i];
  }

  // Monotonic deques for the sliding min and max.
  std::deque<std::size_t> max_q, min_q;
  const double w = static_cast<double>(width);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    while (!max_q.empty() && x[max_q.back()] <= x[i]) max_q.pop_back();
    max_q.push_back(i);
    while (!min_q.empty() && x[min_q.back()] >= x[i]) min_q.pop_back();
    min_q.push_back(i);
    if (i + 1 < width) continue;
    const std::size_t start = i + 1 - width;
    if (max_q.front() < start) max_q.pop_front();
    if (min_q.front() < start) min_q.pop_front();
    const double m = (prefix[i + 1] - prefix[start]) / w;
    const double sd = std::sqrt(std::max(0.0, (prefix_sq[i + 1] - prefix_sq[start]) / w - m * m));
    const double r = x[max_q.front()] - x[min_q.front()];
    const double dm = m - global_mean, ds = sd - global_std, dr = r - global_range;
    acc += std::sqrt(dm * dm + ds * ds + dr * dr);
  }
  return acc / static_cast<double>(windows) / std::sqrt(w);
}

struct ScoreScale {
  double at_one = 0.0;
  double at_full = 0.0;
  bool degenerate = false;
};

ScoreScale score_scale(const std::vector<double>& x) {
  ScoreScale s;
  s.at_one = raw_score(x, 1);
  s.at_full = raw_score(x, x.size() - 1);
  s.degenerate = !(s.at_one - s.at_full > 0.0);
  return s;
}

double relative_score(const std::vector<double>& x, std::size_t width, const ScoreScale& scale) {
  return (raw_score(x, width) - scale.at_full) / (scale.at_one - scale.at_full);
}

}  // namespace

double suss_distance(std::span<const double> channel, std::size_t width) {
  if (width == 0 || width > channel.size()) {
    throw Error(ErrorKind::SeriesTooShort, "window width exceeds channel length");
  }
  const Scaled s = min_max_scale(channel);
  if (s.constant || s.values.size() < 2) return 0.0;
  const ScoreScale scale = score_scale(s.values);
  if (scale.degenerate) return 0.0;
  return relative_score(s.values, width, scale);
}

std::size_t suss_channel_width(std::span<const double> channel, const SussOptions& options) {
  const std::size_t n = channel.size();
  const std::size_t lower = options.lower_bound;
  if (n < 2 * lower) {
    throw Error(ErrorKind::SeriesTooShort, "series of length " + std::to_string(n) +
                                               " is shorter than twice the minimum width " +
                                               std::to_string(lower));
  }
  const std::size_t upper = n / 2;
  const Scaled s = min_max_scale(channel);
  if (s.constant) return lower;
  const ScoreScale scale = score_scale(s.values);
  if (scale.degenerate) return lower;

  auto accepted = [&](std::size_t w) {
    return relative_score(s.values, w, scale) <= options.threshold;
  };

  if (accepted(lower)) return lower;
  std::size_t rejected = lower;
  std::size_t candidate = lower;
  for (;;) {
    if (candidate == upper) return upper;
    candidate = std::min(candidate * 2, upper);
    if (accepted(candidate)) break;
    rejected = candidate;
  }
  // Invariant: rejected fails, candidate passes.
  while (candidate - rejected > 1) {
    const std::size_t mid = rejected + (candidate - rejected) / 2;
    if (accepted(mid)) {
      candidate = mid;
    } else {
      rejected = mid;
    }
  }
  return candidate;
}

WidthEstimate suss_width(const TimeSeries& ts, const SussOptions& options) {
  WidthEstimate estimate;
  std::size_t sum = 0;
  for (std::size_t c = 0; c < ts.channels(); ++c) {
    const std::size_t w = suss_channel_width(ts.channel(c), options);
    estimate.per_channel.push_back(w);
    sum += w;
  }
  const std::size_t d = ts.channels();
  estimate.width = (2 * sum + d) / (2 * d);
  return estimate;
}

}  // namespace clap
