#pragma once

#include <span>
#include <string>

#include "clap/core.hpp"

namespace clap {

// Unweighted mean of per-class F1 over the classes present in y_true. A class
// never predicted contributes 0.
double macro_f1(std::span<const Label> y_true, std::span<const Label> y_pred);

// Expected macro F1 of a classifier that assigns each instance to a class
// drawn from the label priors of y_true.
double f1_rand(std::span<const Label> y_true);

// Classification gain: macro F1 above the random expectation.
double cgain(std::span<const Label> y_true, std::span<const Label> y_pred);

// Weighted best Jaccard overlap of every true segment with any predicted one.
double covering(const Segmentation& truth, const Segmentation& predicted);

double entropy(std::span<const Label> labels);
double mutual_information(std::span<const Label> a, std::span<const Label> b);
// Expectation of the mutual information under the permutation model with the
// marginals of a and b held fixed (hypergeometric cell counts).
double expected_mutual_information(std::span<const Label> a, std::span<const Label> b);
// Adjusted mutual information with arithmetic-mean entropy normalisation.
double ami(std::span<const Label> truth, std::span<const Label> predicted);

struct ScoreReport {
  std::string name;
  double covering = 0.0;
  double ami = 0.0;
  std::size_t num_states_pred = 0;
  std::size_t num_states_true = 0;
};

}  // namespace clap
