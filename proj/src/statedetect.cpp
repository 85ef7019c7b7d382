#include "clap/statedetect.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "clap/metrics.hpp"
#include "clap/rng.hpp"

namespace clap {

std::int64_t ConfusionMatrix::row_sum(std::size_t row) const {
  std::int64_t sum = 0;
  for (std::size_t c = 0; c < labels.size(); ++c) sum += at(row, c);
  return sum;
}

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion_matrix(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::LengthMismatch, "labels and predictions differ in length");
  }
  ConfusionMatrix cm;
  cm.labels.assign(y_true.begin(), y_true.end());
  cm.labels.insert(cm.labels.end(), y_pred.begin(), y_pred.end());
  std::sort(cm.labels.begin(), cm.labels.end());
  cm.labels.erase(std::unique(cm.labels.begin(), cm.labels.end()), cm.labels.end());
  const std::size_t k = cm.labels.size();
  cm.counts.assign(k * k, 0);
  auto index = [&](Label l) {
    return static_cast<std::size_t>(std::lower_bound(cm.labels.begin(), cm.labels.end(), l) -
                                    cm.labels.begin());
  };
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[index(y_true[i]) * k + index(y_pred[i])];
  return cm;
}

std::vector<ConfusedPair> calc_confused_labels(std::span<const Label> labels,
                                               std::span<const Label> y_pred, ConfusionMode mode) {
  const ConfusionMatrix cm = confusion_matrix(labels, y_pred);
  Labels present(labels.begin(), labels.end());
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  if (present.size() < 2) {
    throw Error(ErrorKind::SingleLabel, "confusion ranking needs at least two labels");
  }
  auto index = [&](Label l) {
    return static_cast<std::size_t>(std::lower_bound(cm.labels.begin(), cm.labels.end(), l) -
                                    cm.labels.begin());
  };

  std::vector<ConfusedPair> ranked;
  for (Label a : present) {
    const std::size_t ia = index(a);
    ConfusedPair best{a, 0, -1.0};
    for (Label b : present) {
      if (b == a) continue;
      const std::size_t ib = index(b);
      const double mutual = static_cast<double>(cm.at(ia, ib) + cm.at(ib, ia));
      const double confusion =
          mode == ConfusionMode::Rate ? mutual / static_cast<double>(cm.row_sum(ia) + cm.row_sum(ib))
                                      : mutual;
      if (confusion > best.confusion) best = {a, b, confusion};
    }
    ranked.push_back(best);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const ConfusedPair& x, const ConfusedPair& y) {
    if (x.confusion != y.confusion) return x.confusion > y.confusion;
    if (x.label != y.label) return x.label < y.label;
    return x.counterpart < y.counterpart;
  });
  return ranked;
}

std::pair<Labels, Labels> merge_labels(std::span<const Label> labels, std::span<const Label> y_pred,
                                       Label kept, Label absorbed) {
  if (kept == absorbed) {
    throw Error(ErrorKind::UnknownLabel, "cannot merge label " + std::to_string(kept) + " with itself");
  }
  const bool has_kept = std::find(labels.begin(), labels.end(), kept) != labels.end();
  const bool has_absorbed = std::find(labels.begin(), labels.end(), absorbed) != labels.end();
  if (!has_kept || !has_absorbed) {
    throw Error(ErrorKind::UnknownLabel, "merge of labels " + std::to_string(kept) + " and " +
                                             std::to_string(absorbed) + " not both present");
  }
  auto replace = [&](std::span<const Label> v) {
    Labels out(v.begin(), v.end());
    std::replace(out.begin(), out.end(), absorbed, kept);
    return out;
  };
  return {replace(labels), replace(y_pred)};
}

namespace {

double merge_score(std::span<const Label> labels, std::span<const Label> y_pred, MergeCriterion criterion) {
  return criterion == MergeCriterion::ClassificationGain ? cgain(labels, y_pred) : macro_f1(labels, y_pred);
}

}  // namespace

MergeResult confused_merging(std::span<const Label> labels, std::span<const Label> y_pred,
                             std::size_t max_rounds, const MergeOptions& options) {
  if (labels.size() != y_pred.size()) {
    throw Error(ErrorKind::LengthMismatch, "labels and predictions differ in length");
  }
  MergeResult result;
  result.labels.assign(labels.begin(), labels.end());
  result.y_pred.assign(y_pred.begin(), y_pred.end());

  for (std::size_t round = 0; round < max_rounds; ++round) {
    if (count_distinct(result.labels) < 2) break;
    const double current = merge_score(result.labels, result.y_pred, options.criterion);
    bool merged = false;
    for (const ConfusedPair& pair : calc_confused_labels(result.labels, result.y_pred, options.confusion)) {
      auto [labels_hat, pred_hat] = merge_labels(result.labels, result.y_pred, pair.label, pair.counterpart);
      const double candidate = merge_score(labels_hat, pred_hat, options.criterion);
      if (candidate >= current) {
        result.trace.push_back({pair.label, pair.counterpart, current, candidate});
        result.labels = std::move(labels_hat);
        result.y_pred = std::move(pred_hat);
        merged = true;
        break;
      }
    }
    if (!merged) break;
  }

  // Same first-occurrence mapping for both vectors; predictions only name
  // labels that occur in the training labels.
  std::map<Label, Label> mapping;
  for (Label l : result.labels) mapping.emplace(l, static_cast<Label>(mapping.size() + 1));
  for (Label& l : result.labels) l = mapping.at(l);
  for (Label& l : result.y_pred) {
    if (auto it = mapping.find(l); it != mapping.end()) l = it->second;
  }
  return result;
}

WindowDataset create_dataset(const TimeSeries& ts, std::size_t width, const Segmentation& segmentation,
                             RngSeed seed, const DatasetOptions& options) {
  const std::size_t n = ts.length();
  if (width == 0 || n < 2 * width) {
    throw Error(ErrorKind::SeriesTooShort, "series of length " + std::to_string(n) +
                                               " is shorter than two windows of width " +
                                               std::to_string(width));
  }
  if (segmentation.length() != n) {
    throw Error(ErrorKind::LengthMismatch, "segmentation length differs from series length");
  }
  const std::size_t stride = std::max<std::size_t>(1, width / 2);
  const std::size_t outside_limit = width / 2;

  std::vector<std::size_t> starts;
  Labels labels;
  for (std::size_t start = 0; start + width <= n; start += stride) {
    const std::size_t seg = segmentation.segment_of(start);
    const std::size_t seg_end = segmentation.segment_end(seg);
    const std::size_t inside = std::min(start + width, seg_end) - start;
    if (width - inside >= outside_limit && outside_limit > 0) continue;
    starts.push_back(start);
    labels.push_back(static_cast<Label>(seg + 1));
  }
  if (starts.empty()) {
    throw Error(ErrorKind::NoWindowsLeft, "every window overlaps a neighbouring segment");
  }

  if (starts.size() > options.max_samples) {
    std::vector<std::size_t> order(starts.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, "sampling");
    // Partial Fisher-Yates: the first max_samples positions are a uniform sample.
    for (std::size_t i = 0; i < options.max_samples; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
      std::swap(order[i], order[j]);
    }
    order.resize(options.max_samples);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> kept_starts;
    Labels kept_labels;
    for (std::size_t i : order) {
      kept_starts.push_back(starts[i]);
      kept_labels.push_back(labels[i]);
    }
    starts = std::move(kept_starts);
    labels = std::move(kept_labels);
  }

  WindowDataset dataset;
  dataset.width = width;
  dataset.channels = ts.channels();
  dataset.starts = std::move(starts);
  dataset.labels = std::move(labels);
  dataset.values.reserve(dataset.starts.size() * width * ts.channels());
  for (std::size_t start : dataset.starts) {
    for (std::size_t c = 0; c < ts.channels(); ++c) {
      const auto channel = ts.channel(c).subspan(start, width);
      dataset.values.insert(dataset.values.end(), channel.begin(), channel.end());
    }
  }
  return dataset;
}

StateSequence expand_to_state_sequence(const Segmentation& segmentation,
                                       std::span<const Label> segment_labels) {
  if (segment_labels.size() != segmentation.num_segments()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(segment_labels.size()) + " labels for " +
                                               std::to_string(segmentation.num_segments()) +
                                               " segments");
  }
  Labels states;
  states.reserve(segmentation.length());
  for (std::size_t s = 0; s < segmentation.num_segments(); ++s) {
    states.insert(states.end(), segmentation.segment_end(s) - segmentation.segment_begin(s),
                  segment_labels[s]);
  }
  return StateSequence{canonicalize_labels(states)};
}

ClapResult clap(const TimeSeries& ts, RngSeed seed, const ClapOptions& options) {
  ClapResult result;
  const std::size_t n = ts.length();
  const std::size_t width = suss_width(ts, options.suss).width;
  result.profile.width = width;

  if (n >= options.clasp.min_segment_factor * width) {
    result.segmentation = extract_cps(ts, width, options.clasp, &result.decisions);
  } else {
    result.segmentation = Segmentation({}, n);
  }
  const std::size_t segments = result.segmentation.num_segments();
  result.segment_labels.resize(segments);
  for (std::size_t r = 0; r < segments; ++r) {
    result.segment_labels[r] = options.initial_label ? options.initial_label(r + 1) : static_cast<Label>(r + 1);
  }

  auto finish = [&] {
    result.states = expand_to_state_sequence(result.segmentation, result.segment_labels);
    result.segment_labels = canonicalize_labels(result.segment_labels);
    result.num_states = count_distinct(result.segment_labels);
    return result;
  };

  if (segments == 1) {
    if (n >= 2 * width) {
      result.profile.labels = create_dataset(ts, width, result.segmentation, seed, options.dataset).labels;
    }
    result.profile.score = 1.0;
    return finish();
  }

  WindowDataset dataset = create_dataset(ts, width, result.segmentation, seed, options.dataset);
  for (Label& l : dataset.labels) l = result.segment_labels[static_cast<std::size_t>(l - 1)];
  if (count_distinct(dataset.labels) < 2) {
    result.profile.labels = dataset.labels;
    result.profile.score = 1.0;
    return finish();
  }
  const KernelSet kernels = generate_kernels(seed, options.kernel_count, width, ts.channels());
  const FeatureMatrix features = transform(dataset, kernels);
  const CvPrediction cv = cross_val_predict(features, dataset.labels, options.folds, seed, options.ridge);

  MergeResult merged = confused_merging(dataset.labels, cv.y_pred, result.segmentation.change_points().size(),
                                        options.merge);
  for (const MergeStep& step : merged.trace) {
    std::replace(result.segment_labels.begin(), result.segment_labels.end(), step.absorbed, step.kept);
  }
  result.trace = std::move(merged.trace);
  result.profile.score = macro_f1(merged.labels, merged.y_pred);
  result.profile.labels = std::move(merged.labels);
  return finish();
}

}  // namespace clap
