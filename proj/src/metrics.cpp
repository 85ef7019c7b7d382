#include "clap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace clap {

namespace {

void require_same_length(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch, "label vectors differ in length: " +
                                               std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()));
  }
}

// Dense re-indexing: labels -> 0..k-1 in sorted label order.
std::vector<std::size_t> dense_codes(std::span<const Label> labels, std::size_t& k) {
  std::map<Label, std::size_t> index;
  for (Label l : labels) index.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, code] : index) code = next++;
  k = next;
  std::vector<std::size_t> codes;
  codes.reserve(labels.size());
  for (Label l : labels) codes.push_back(index[l]);
  return codes;
}

struct Contingency {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cells;
  std::vector<double> row_sums;
  std::vector<double> col_sums;
  double total = 0.0;

  double at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

Contingency contingency(std::span<const Label> a, std::span<const Label> b) {
  Contingency c;
  auto ca = dense_codes(a, c.rows);
  auto cb = dense_codes(b, c.cols);
  c.cells.assign(c.rows * c.cols, 0.0);
  c.row_sums.assign(c.rows, 0.0);
  c.col_sums.assign(c.cols, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    c.cells[ca[i] * c.cols + cb[i]] += 1.0;
    c.row_sums[ca[i]] += 1.0;
    c.col_sums[cb[i]] += 1.0;
  }
  c.total = static_cast<double>(a.size());
  return c;
}

// Same partition of the index set, irrespective of label values.
bool same_partition(std::span<const Label> a, std::span<const Label> b) {
  std::map<Label, Label> forward, backward;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, f_new] = forward.emplace(a[i], b[i]);
    auto [g, g_new] = backward.emplace(b[i], a[i]);
    if (f->second != b[i] || g->second != a[i]) return false;
  }
  return true;
}

}  // namespace

double macro_f1(std::span<const Label> y_true, std::span<const Label> y_pred) {
  require_same_length(y_true, y_pred);
  if (y_true.empty()) throw Error(ErrorKind::EmptyInput, "macro_f1 of empty labels");
  std::map<Label, std::size_t> tp, true_count, pred_count;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++true_count[y_true[i]];
    ++pred_count[y_pred[i]];
    if (y_true[i] == y_pred[i]) ++tp[y_true[i]];
  }
  double sum = 0.0;
  for (const auto& [label, count] : true_count) {
    const double t = static_cast<double>(tp[label]);
    const double denom = static_cast<double>(count + pred_count[label]);
    sum += 2.0 * t / denom;
  }
  return sum / static_cast<double>(true_count.size());
}

double f1_rand(std::span<const Label> y_true) {
  if (y_true.empty()) throw Error(ErrorKind::EmptyInput, "f1_rand of empty labels");
  std::map<Label, std::size_t> counts;
  for (Label l : y_true) ++counts[l];
  const double n = static_cast<double>(y_true.size());
  double sum = 0.0;
  for (const auto& [label, count] : counts) {
    const double in_class = static_cast<double>(count);
    const double out_class = n - in_class;
    const double p_in = in_class / n;
    const double p_out = out_class / n;
    const double tp = in_class * p_in;
    const double fn = in_class * p_out;
    const double fp = out_class * p_in;
    sum += 2.0 * tp / (2.0 * tp + fn + fp);
  }
  return sum / static_cast<double>(counts.size());
}

double cgain(std::span<const Label> y_true, std::span<const Label> y_pred) {
  require_same_length(y_true, y_pred);
  return macro_f1(y_true, y_pred) - f1_rand(y_true);
}

double covering(const Segmentation& truth, const Segmentation& predicted) {
  if (truth.length() != predicted.length()) {
    throw Error(ErrorKind::LengthMismatch, "segmentations cover different lengths");
  }
  const double n = static_cast<double>(truth.length());
  double score = 0.0;
  for (std::size_t i = 0; i < truth.num_segments(); ++i) {
    const std::size_t b = truth.segment_begin(i);
    const std::size_t e = truth.segment_end(i);
    double best = 0.0;
    for (std::size_t j = 0; j < predicted.num_segments(); ++j) {
      const std::size_t pb = predicted.segment_begin(j);
      const std::size_t pe = predicted.segment_end(j);
      const std::size_t lo = std::max(b, pb);
      const std::size_t hi = std::min(e, pe);
      if (hi <= lo) continue;
      const double inter = static_cast<double>(hi - lo);
      const double uni = static_cast<double>(std::max(e, pe) - std::min(b, pb));
      best = std::max(best, inter / uni);
    }
    score += static_cast<double>(e - b) * best;
  }
  return score / n;
}

double entropy(std::span<const Label> labels) {
  if (labels.empty()) return 0.0;
  std::map<Label, std::size_t> counts;
  for (Label l : labels) ++counts[l];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto& [label, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h;
}

double mutual_information(std::span<const Label> a, std::span<const Label> b) {
  require_same_length(a, b);
  if (a.empty()) return 0.0;
  const Contingency c = contingency(a, b);
  double mi = 0.0;
  for (std::size_t i = 0; i < c.rows; ++i) {
    for (std::size_t j = 0; j < c.cols; ++j) {
      const double nij = c.at(i, j);
      if (nij == 0.0) continue;
      mi += nij / c.total * std::log(c.total * nij / (c.row_sums[i] * c.col_sums[j]));
    }
  }
  return std::max(mi, 0.0);
}

double expected_mutual_information(std::span<const Label> a, std::span<const Label> b) {
  require_same_length(a, b);
  if (a.empty()) return 0.0;
  const Contingency c = contingency(a, b);
  const double n = c.total;
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (double ai : c.row_sums) {
    for (double bj : c.col_sums) {
      const double lo = std::max(1.0, ai + bj - n);
      const double hi = std::min(ai, bj);
      const double fixed = std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) +
                           std::lgamma(n - ai + 1.0) + std::lgamma(n - bj + 1.0) - lg_n;
      for (double nij = lo; nij <= hi; nij += 1.0) {
        const double log_p = fixed - std::lgamma(nij + 1.0) - std::lgamma(ai - nij + 1.0) -
                             std::lgamma(bj - nij + 1.0) - std::lgamma(n - ai - bj + nij + 1.0);
        emi += nij / n * std::log(n * nij / (ai * bj)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

double ami(std::span<const Label> truth, std::span<const Label> predicted) {
  require_same_length(truth, predicted);
  if (truth.empty()) throw Error(ErrorKind::EmptyInput, "ami of empty labels");
  // Covers the both-trivial 0/0 case as well.
  if (same_partition(truth, predicted)) return 1.0;
  const double mi = mutual_information(truth, predicted);
  const double emi = expected_mutual_information(truth, predicted);
  const double mean_h = 0.5 * (entropy(truth) + entropy(predicted));
  const double denom = mean_h - emi;
  if (std::abs(denom) < 1e-15) return 0.0;
  return std::clamp((mi - emi) / denom, -1.0, 1.0);
}

}  // namespace clap
