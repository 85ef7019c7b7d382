#include "clap/segmentation.hpp"

#include <algorithm>
#include <limits>

namespace clap {

namespace {

struct WindowStats {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<char> constant;
};

WindowStats window_stats(std::span<const double> x, std::size_t width) {
  const std::size_t m = x.size() - width + 1;
  WindowStats s;
  s.mean.resize(m);
  s.std.resize(m);
  s.constant.resize(m);
  const double w = static_cast<double>(width);
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < width; ++t) sum += x[i + t];
    const double mu = sum / w;
    double sq = 0.0;
    for (std::size_t t = 0; t < width; ++t) sq += (x[i + t] - mu) * (x[i + t] - mu);
    const double sigma = std::sqrt(sq / w);
    s.mean[i] = mu;
    s.std[i] = sigma;
    s.constant[i] = sigma <= 1e-10 * std::max(1.0, std::abs(mu));
  }
  return s;
}

double dot(std::span<const double> x, std::size_t a, std::size_t b, std::size_t width) {
  double acc = 0.0;
  for (std::size_t t = 0; t < width; ++t) acc += x[a + t] * x[b + t];
  return acc;
}

// Sorted k-nearest lists of all windows in flat storage. Strict comparison
// keeps the earlier (lower) index on ties, given that candidates arrive in
// ascending index order.
class TopK {
 public:
  TopK(std::size_t m, std::size_t k)
      : k_(k), dist_(m * k, std::numeric_limits<double>::infinity()), index_(m * k, 0), filled_(m, 0) {}

  // Distance a candidate must beat to enter the list of window i.
  double bound(std::size_t i) const { return dist_[i * k_ + k_ - 1]; }

  void offer(std::size_t i, double d, std::uint32_t j) {
    double* dist = &dist_[i * k_];
    std::uint32_t* index = &index_[i * k_];
    std::size_t pos = std::min(filled_[i], k_ - 1);
    while (pos > 0 && d < dist[pos - 1]) {
      dist[pos] = dist[pos - 1];
      index[pos] = index[pos - 1];
      --pos;
    }
    dist[pos] = d;
    index[pos] = j;
    filled_[i] = std::min(filled_[i] + 1, k_);
  }

  std::vector<std::uint32_t> list(std::size_t i) const {
    return {index_.begin() + static_cast<std::ptrdiff_t>(i * k_),
            index_.begin() + static_cast<std::ptrdiff_t>(i * k_ + filled_[i])};
  }

 private:
  std::size_t k_;
  std::vector<double> dist_;
  std::vector<std::uint32_t> index_;
  std::vector<std::size_t> filled_;
};

double binary_macro_f1(const SplitConfusion& cm) {
  double sum = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(cm[c][c]);
    const double fn = static_cast<double>(cm[c][1 - c]);
    const double fp = static_cast<double>(cm[1 - c][c]);
    const double denom = 2.0 * tp + fn + fp;
    sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;
  }
  return sum / 2.0;
}

std::size_t min_segment(std::size_t width, const ClaspOptions& options) {
  return options.min_segment_factor * width;
}

void require_length(std::size_t n, std::size_t width, const ClaspOptions& options) {
  if (width == 0 || n < min_segment(width, options)) {
    throw Error(ErrorKind::SeriesTooShort,
                "series of length " + std::to_string(n) + " is too short for width " +
                    std::to_string(width) + " (needs " +
                    std::to_string(min_segment(width, options)) + ")");
  }
}

int vote(const std::vector<std::uint32_t>& neighbours, std::size_t split) {
  std::size_t ones = 0;
  for (auto j : neighbours) ones += j >= split;
  return 2 * ones > neighbours.size() ? 1 : 0;
}

}  // namespace

std::optional<std::size_t> ClaspProfile::best_offset() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!valid(i)) continue;
    if (!best || scores[i] > scores[*best]) best = i;
  }
  return best;
}

std::vector<std::vector<std::uint32_t>> knn_windows(std::span<const std::span<const double>> channels,
                                                    std::size_t width, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::Config, "neighbour count must be positive");
  if (channels.empty() || width == 0 || channels.front().size() < width) {
    throw Error(ErrorKind::SeriesTooShort, "no complete window of width " + std::to_string(width));
  }
  const std::size_t n = channels.front().size();
  const std::size_t m = n - width + 1;
  const std::size_t d = channels.size();
  const double w = static_cast<double>(width);
  const double orthogonal = std::sqrt(w);

  std::vector<WindowStats> stats;
  stats.reserve(d);
  for (auto x : channels) stats.push_back(window_stats(x, width));

  TopK top(m, k);
  // Sliding dot products of window i against every window j, one row per
  // channel, advanced along i.
  std::vector<std::vector<double>> qt(d, std::vector<double>(m));
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t j = 0; j < m; ++j) qt[c][j] = dot(channels[c], 0, j, width);
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) {
      for (std::size_t c = 0; c < d; ++c) {
        const auto x = channels[c];
        auto& row = qt[c];
        const double out = x[i - 1];
        const double in = x[i + width - 1];
        for (std::size_t j = m - 1; j > 0; --j) {
          row[j] = row[j - 1] - out * x[j - 1] + in * x[j + width - 1];
        }
        row[0] = dot(x, i, 0, width);
      }
    }
    for (std::size_t j = i + width; j < m; ++j) {
      double dist = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const WindowStats& s = stats[c];
        const bool ci = s.constant[i], cj = s.constant[j];
        if (ci && cj) continue;
        if (ci || cj) {
          dist += orthogonal;
          continue;
        }
        const double corr = (qt[c][j] - w * s.mean[i] * s.mean[j]) / (w * s.std[i] * s.std[j]);
        dist += std::sqrt(std::max(0.0, 2.0 * w * (1.0 - corr)));
      }
      // An unfilled list has an infinite bound, so this also fills lists.
      if (dist < top.bound(i)) top.offer(i, dist, static_cast<std::uint32_t>(j));
      if (dist < top.bound(j)) top.offer(j, dist, static_cast<std::uint32_t>(i));
    }
  }

  std::vector<std::vector<std::uint32_t>> result(m);
  for (std::size_t i = 0; i < m; ++i) result[i] = top.list(i);
  return result;
}

std::vector<double> profile_from_neighbours(const std::vector<std::vector<std::uint32_t>>& neighbours,
                                            std::size_t length, std::size_t width,
                                            const ClaspOptions& options) {
  const std::size_t m = neighbours.size();
  const std::size_t margin = min_segment(width, options);
  std::vector<double> scores(m, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::vector<std::uint32_t>> reverse(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto j : neighbours[i]) reverse[j].push_back(static_cast<std::uint32_t>(i));
  }

  // Split s labels windows [0, s) as class 0 and [s, m) as class 1. Start
  // with s = 0 and move windows to class 0 one at a time.
  std::vector<std::size_t> ones(m);
  std::vector<int> truth(m, 1), pred(m);
  SplitConfusion cm{};
  auto predict = [&](std::size_t i) { return 2 * ones[i] > neighbours[i].size() ? 1 : 0; };
  for (std::size_t i = 0; i < m; ++i) {
    ones[i] = neighbours[i].size();
    pred[i] = predict(i);
    ++cm[truth[i]][pred[i]];
  }

  for (std::size_t s = 1; s < m; ++s) {
    const std::size_t moved = s - 1;
    --cm[truth[moved]][pred[moved]];
    truth[moved] = 0;
    ++cm[truth[moved]][pred[moved]];
    for (auto i : reverse[moved]) {
      --ones[i];
      const int p = predict(i);
      if (p != pred[i]) {
        --cm[truth[i]][pred[i]];
        pred[i] = p;
        ++cm[truth[i]][pred[i]];
      }
    }
    if (s >= margin && length - s >= margin) scores[s] = binary_macro_f1(cm);
  }
  return scores;
}

SplitConfusion split_confusion(const std::vector<std::vector<std::uint32_t>>& neighbours,
                               std::size_t split) {
  SplitConfusion cm{};
  for (std::size_t i = 0; i < neighbours.size(); ++i) {
    ++cm[i < split ? 0 : 1][vote(neighbours[i], split)];
  }
  return cm;
}

double split_chi_square(const SplitConfusion& cm, std::size_t width) {
  const double scale = 1.0 / static_cast<double>(width);
  const double a = cm[0][0] * scale, b = cm[0][1] * scale;
  const double c = cm[1][0] * scale, d = cm[1][1] * scale;
  const double n = a + b + c + d;
  const double margins = (a + b) * (c + d) * (a + c) * (b + d);
  if (!(margins > 0.0)) return 0.0;
  const double det = a * d - b * c;
  return n * det * det / margins;
}

double split_p_value(const SplitConfusion& cm, std::size_t width) {
  return std::erfc(std::sqrt(split_chi_square(cm, width) / 2.0));
}

bool split_is_valid(double score, const SplitConfusion& confusion, std::size_t width,
                    const ClaspOptions& options) {
  switch (options.validation) {
    case Validation::Score:
      return score >= options.validation_threshold;
    case Validation::Significance:
      // Only splits predicted better than chance count.
      return score > 0.5 && split_p_value(confusion, width) <= options.significance_level;
  }
  return false;
}

ClaspProfile clasp_profile(const TimeSeries& ts, std::size_t width, const ClaspOptions& options) {
  require_length(ts.length(), width, options);
  std::vector<std::span<const double>> channels;
  for (std::size_t c = 0; c < ts.channels(); ++c) channels.push_back(ts.channel(c));
  ClaspProfile profile;
  profile.width = width;
  const auto neighbours = knn_windows(channels, width, options.neighbours);
  profile.scores = profile_from_neighbours(neighbours, ts.length(), width, options);
  return profile;
}

namespace {

struct Candidate {
  std::size_t offset = 0;  // absolute
  double score = 0.0;
  SplitConfusion confusion{};
  double chi_square = 0.0;
};

std::optional<Candidate> best_split(const TimeSeries& ts, std::size_t begin, std::size_t end,
                                   std::size_t width, const ClaspOptions& options) {
  std::vector<std::span<const double>> channels;
  for (std::size_t c = 0; c < ts.channels(); ++c) channels.push_back(ts.channel(c).subspan(begin, end - begin));
  const auto neighbours = knn_windows(channels, width, options.neighbours);
  ClaspProfile profile;
  profile.width = width;
  profile.scores = profile_from_neighbours(neighbours, end - begin, width, options);
  const auto best = profile.best_offset();
  if (!best) return std::nullopt;
  Candidate candidate{begin + *best, profile.scores[*best], split_confusion(neighbours, *best), 0.0};
  candidate.chi_square = split_chi_square(candidate.confusion, width);
  return candidate;
}

bool preferred(const Candidate& a, const Candidate& b, const ClaspOptions& options) {
  if (options.validation == Validation::Score) return a.score > b.score;
  const bool a_better = a.score > 0.5, b_better = b.score > 0.5;
  if (a_better != b_better) return a_better;
  return a.chi_square > b.chi_square;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> search_intervals(std::size_t begin, std::size_t end,
                                                                  std::size_t width,
                                                                  const ClaspOptions& options) {
  const std::size_t min_len = min_segment(width, options);
  std::vector<std::pair<std::size_t, std::size_t>> intervals{{begin, end}};
  std::size_t length = end - begin;
  for (std::size_t level = 1; level < options.interval_levels; ++level) {
    length /= 2;
    if (length < 2 * min_len) break;
    const std::size_t step = length / 2;
    for (std::size_t start = begin;; start += step) {
      if (start + length >= end) {
        intervals.emplace_back(end - length, end);
        break;
      }
      intervals.emplace_back(start, start + length);
    }
  }
  return intervals;
}

Segmentation extract_cps(const TimeSeries& ts, std::size_t width, const ClaspOptions& options,
                         std::vector<SplitDecision>* decisions) {
  require_length(ts.length(), width, options);
  const std::size_t min_len = min_segment(width, options);
  std::vector<std::size_t> cps;
  std::vector<std::pair<std::size_t, std::size_t>> ranges{{0, ts.length()}};
  while (!ranges.empty()) {
    const auto [begin, end] = ranges.back();
    ranges.pop_back();
    if (end - begin < 2 * min_len) continue;
    std::optional<Candidate> chosen;
    for (const auto& [from, to] : search_intervals(begin, end, width, options)) {
      const auto candidate = best_split(ts, from, to, width, options);
      if (candidate && (!chosen || preferred(*candidate, *chosen, options))) chosen = candidate;
    }
    if (!chosen) continue;
    const bool accepted = split_is_valid(chosen->score, chosen->confusion, width, options);
    if (decisions) {
      decisions->push_back({begin, end, chosen->offset, chosen->score,
                            split_p_value(chosen->confusion, width), accepted});
    }
    if (!accepted) continue;
    cps.push_back(chosen->offset);
    ranges.emplace_back(chosen->offset, end);
    ranges.emplace_back(begin, chosen->offset);
  }
  std::sort(cps.begin(), cps.end());
  return Segmentation(std::move(cps), ts.length());
}

}  // namespace clap
