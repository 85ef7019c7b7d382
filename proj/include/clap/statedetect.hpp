#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "clap/classifier.hpp"
#include "clap/core.hpp"
#include "clap/segmentation.hpp"
#include "clap/windowing.hpp"

namespace clap {

// Rows are true labels, columns predicted labels, both indexed by the sorted
// union of labels seen in either vector.
struct ConfusionMatrix {
  Labels labels;
  std::vector<std::int64_t> counts;

  std::size_t size() const { return labels.size(); }
  std::int64_t at(std::size_t row, std::size_t col) const { return counts[row * labels.size() + col]; }
  std::int64_t row_sum(std::size_t row) const;
  std::int64_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const Label> y_true, std::span<const Label> y_pred);

enum class ConfusionMode {
  // (C[a,b] + C[b,a]) / (rows a + b)
  Rate,
  // C[a,b] + C[b,a]
  Count,
};

// Merge acceptance score. MacroF1 exists for comparison runs only.
enum class MergeCriterion { ClassificationGain, MacroF1 };

struct ConfusedPair {
  Label label = 0;
  Label counterpart = 0;
  double confusion = 0.0;
};

// For every true label its most confused counterpart, sorted by confusion
// descending, then by label and counterpart ascending.
std::vector<ConfusedPair> calc_confused_labels(std::span<const Label> labels,
                                               std::span<const Label> y_pred,
                                               ConfusionMode mode = ConfusionMode::Rate);

// Replaces every `absorbed` by `kept` in both vectors.
std::pair<Labels, Labels> merge_labels(std::span<const Label> labels, std::span<const Label> y_pred,
                                       Label kept, Label absorbed);

struct MergeStep {
  Label kept = 0;
  Label absorbed = 0;
  double score_before = 0.0;
  double score_after = 0.0;
};

using MergeTrace = std::vector<MergeStep>;

struct MergeOptions {
  ConfusionMode confusion = ConfusionMode::Rate;
  MergeCriterion criterion = MergeCriterion::ClassificationGain;
};

struct MergeResult {
  Labels labels;
  Labels y_pred;
  MergeTrace trace;
};

// Greedy agglomeration of confused labels. Each round walks the ranked pairs
// and applies the first merge that does not lower the criterion; a round
// without a merge ends the loop, as does reaching max_rounds. Returned labels
// are canonicalised; the trace keeps the original label values.
MergeResult confused_merging(std::span<const Label> labels, std::span<const Label> y_pred,
                             std::size_t max_rounds, const MergeOptions& options = {});

struct DatasetOptions {
  std::size_t max_samples = 1000;
};

// Windows of width w at stride max(1, w/2), labelled by the 1-based rank of
// the segment containing their start. Windows with at least w/2 values outside
// that segment are dropped.
WindowDataset create_dataset(const TimeSeries& ts, std::size_t width, const Segmentation& segmentation,
                             RngSeed seed, const DatasetOptions& options = {});

StateSequence expand_to_state_sequence(const Segmentation& segmentation,
                                       std::span<const Label> segment_labels);

struct ClapOptions {
  SussOptions suss;
  ClaspOptions clasp;
  DatasetOptions dataset;
  std::size_t kernel_count = 10000;
  std::size_t folds = 5;
  RidgeOptions ridge;
  MergeOptions merge;
  // Initial label of the segment with 1-based rank r; ranks themselves when
  // empty. Only useful for checking that results do not depend on label values.
  std::function<Label(std::size_t rank)> initial_label;
};

struct ClapResult {
  LabelProfile profile;
  Segmentation segmentation;
  std::vector<SplitDecision> decisions;  // every range the segmentation evaluated
  Labels segment_labels;  // final state per segment, canonical
  StateSequence states;
  std::size_t num_states = 0;
  MergeTrace trace;
};

ClapResult clap(const TimeSeries& ts, RngSeed seed, const ClapOptions& options = {});

}  // namespace clap
