#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "clap/core.hpp"
#include "clap/metrics.hpp"

namespace clap {

struct Kernel {
  std::vector<double> weights;  // length 7, 9 or 11, mean-centred
  double bias = 0.0;
  std::size_t dilation = 1;
  std::size_t padding = 0;
  std::size_t channel = 0;

  std::size_t length() const { return weights.size(); }
};

struct KernelSet {
  std::vector<Kernel> kernels;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t size() const { return kernels.size(); }
};

// Rows are windows; columns 2k and 2k+1 hold PPV and max of kernel k.
using FeatureMatrix = Eigen::MatrixXd;

KernelSet generate_kernels(RngSeed seed, std::size_t count, std::size_t width, std::size_t channels);

// PPV (fraction of positive outputs) and max of one dilated convolution.
std::pair<double, double> apply_kernel(std::span<const double> x, const Kernel& kernel);

FeatureMatrix transform(const WindowDataset& dataset, const KernelSet& kernels);

struct RidgeOptions {
  std::vector<double> alphas{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
};

// One-vs-rest ridge regression on 0/1 targets over standardised features.
struct RidgeModel {
  Labels classes;  // ascending
  Eigen::RowVectorXd feature_mean;
  Eigen::RowVectorXd feature_scale;
  Eigen::MatrixXd coef;  // features x classes
  Eigen::RowVectorXd intercept;
  double alpha = 0.0;

  // Highest scoring class; ties go to the lower label.
  Label predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

// Fits on the given rows only. The regularisation strength is picked from
// the grid by exact leave-one-out error on the training rows.
RidgeModel fit_ridge(const FeatureMatrix& features, std::span<const Label> labels,
                     std::span<const std::size_t> train_rows, const RidgeOptions& options = {});

struct CvPrediction {
  Labels y_pred;
  std::vector<int> fold_of;  // 1-based
  // Singleton-class members, predicted by a model that also trained on them.
  std::vector<bool> provisional;
};

// Stratified k-fold assignment. Members of each class are shuffled and dealt
// round robin, continuing across classes so fold sizes stay balanced.
// Relabelling the classes does not change the assignment.
std::vector<int> stratified_folds(std::span<const Label> labels, std::size_t folds, RngSeed seed);

CvPrediction cross_val_predict(const FeatureMatrix& features, std::span<const Label> labels,
                               std::size_t folds, RngSeed seed, const RidgeOptions& options = {});

}  // namespace clap
