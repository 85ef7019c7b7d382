#include "clap/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "clap/rng.hpp"

namespace clap {

namespace {
constexpr std::size_t kLengths[] = {7, 9, 11};
}

KernelSet generate_kernels(RngSeed seed, std::size_t count, std::size_t width, std::size_t channels) {
  if (width < 7) {
    throw Error(ErrorKind::WidthTooSmall,
                "kernel transform needs windows of at least 7 values, got " + std::to_string(width));
  }
  if (channels == 0) throw Error(ErrorKind::EmptySeries, "kernel transform needs channels");
  Rng rng(seed, "kernels");
  KernelSet set;
  set.width = width;
  set.channels = channels;
  set.kernels.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Kernel kernel;
    // Lengths longer than the window are never drawn.
    const std::size_t allowed = width >= 11 ? 3 : (width >= 9 ? 2 : 1);
    const std::size_t length = kLengths[rng.below(allowed)];
    kernel.weights.resize(length);
    for (double& v : kernel.weights) v = rng.normal();
    const double mean =
        std::accumulate(kernel.weights.begin(), kernel.weights.end(), 0.0) / static_cast<double>(length);
    for (double& v : kernel.weights) v -= mean;
    kernel.bias = rng.uniform(-1.0, 1.0);

    const std::size_t max_dilation = (width - 1) / (length - 1);
    const double exponent = rng.uniform(0.0, std::log2(static_cast<double>(width - 1) /
                                                        static_cast<double>(length - 1)));
    kernel.dilation = std::clamp<std::size_t>(static_cast<std::size_t>(std::pow(2.0, exponent)), 1,
                                              max_dilation);
    kernel.padding = rng.below(2) == 1 ? (length - 1) * kernel.dilation / 2 : 0;
    kernel.channel = static_cast<std::size_t>(rng.below(channels));
    set.kernels.push_back(std::move(kernel));
  }
  return set;
}

std::pair<double, double> apply_kernel(std::span<const double> x, const Kernel& kernel) {
  const auto w = static_cast<std::ptrdiff_t>(x.size());
  const auto len = static_cast<std::ptrdiff_t>(kernel.length());
  const auto dil = static_cast<std::ptrdiff_t>(kernel.dilation);
  const auto pad = static_cast<std::ptrdiff_t>(kernel.padding);
  const std::ptrdiff_t outputs = w + 2 * pad - (len - 1) * dil;
  if (outputs <= 0) return {0.0, kernel.bias};

  std::size_t positive = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t i = 0; i < outputs; ++i) {
    double sum = kernel.bias;
    const std::ptrdiff_t origin = i - pad;
    for (std::ptrdiff_t j = 0; j < len; ++j) {
      const std::ptrdiff_t idx = origin + j * dil;
      if (idx >= 0 && idx < w) sum += kernel.weights[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(idx)];
    }
    if (sum > 0.0) ++positive;
    best = std::max(best, sum);
  }
  return {static_cast<double>(positive) / static_cast<double>(outputs), best};
}

FeatureMatrix transform(const WindowDataset& dataset, const KernelSet& kernels) {
  if (dataset.width != kernels.width || dataset.channels != kernels.channels) {
    throw Error(ErrorKind::LengthMismatch, "kernel set was generated for a different window shape");
  }
  FeatureMatrix features(static_cast<Eigen::Index>(dataset.size()),
                         static_cast<Eigen::Index>(2 * kernels.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const Kernel& kernel = kernels.kernels[k];
      const auto [ppv, max] = apply_kernel(dataset.window_channel(i, kernel.channel), kernel);
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k)) = ppv;
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k + 1)) = max;
    }
  }
  return features;
}

Label RidgeModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  const Eigen::RowVectorXd z = (row - feature_mean).cwiseQuotient(feature_scale);
  const Eigen::RowVectorXd scores = z * coef + intercept;
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = c;
  }
  return classes[static_cast<std::size_t>(best)];
}

RidgeModel fit_ridge(const FeatureMatrix& features, std::span<const Label> labels,
                     std::span<const std::size_t> train_rows, const RidgeOptions& options) {
  using Eigen::Index;
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  RidgeModel model;
  const Index m = static_cast<Index>(train_rows.size());
  const Index p = features.cols();

  MatrixXd x(m, p);
  for (Index r = 0; r < m; ++r) x.row(r) = features.row(static_cast<Index>(train_rows[static_cast<std::size_t>(r)]));
  model.feature_mean = x.colwise().mean();
  x.rowwise() -= model.feature_mean;
  model.feature_scale = (x.colwise().squaredNorm() / static_cast<double>(m)).cwiseSqrt();
  for (Index c = 0; c < p; ++c) {
    if (!(model.feature_scale(c) > 1e-12)) model.feature_scale(c) = 1.0;
  }
  x.array().rowwise() /= model.feature_scale.array();

  for (auto r : train_rows) model.classes.push_back(labels[r]);
  std::sort(model.classes.begin(), model.classes.end());
  model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
  const Index k = static_cast<Index>(model.classes.size());
  std::map<Label, Index> column;
  for (Index c = 0; c < k; ++c) column[model.classes[static_cast<std::size_t>(c)]] = c;

  MatrixXd y = MatrixXd::Zero(m, k);
  for (Index r = 0; r < m; ++r) y(r, column[labels[train_rows[static_cast<std::size_t>(r)]]]) = 1.0;
  model.intercept = y.colwise().mean();
  y.rowwise() -= model.intercept;

  // Left singular vectors U and squared singular values of x from whichever
  // Gram matrix is smaller.
  MatrixXd u;
  VectorXd eig;
  if (m <= p) {
    MatrixXd gram = MatrixXd::Zero(m, m);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(gram.selfadjointView<Eigen::Lower>());
    u = solver.eigenvectors();
    eig = solver.eigenvalues().cwiseMax(0.0);
  } else {
    MatrixXd cov = MatrixXd::Zero(p, p);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(cov.selfadjointView<Eigen::Lower>());
    const double tol = 1e-10 * std::max(1.0, solver.eigenvalues().maxCoeff());
    std::vector<Index> keep;
    for (Index i = 0; i < p; ++i) {
      if (solver.eigenvalues()(i) > tol) keep.push_back(i);
    }
    u.resize(m, static_cast<Index>(keep.size()));
    eig.resize(static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      const double lambda = solver.eigenvalues()(keep[j]);
      eig(static_cast<Index>(j)) = lambda;
      u.col(static_cast<Index>(j)) = x * solver.eigenvectors().col(keep[j]) / std::sqrt(lambda);
    }
  }

  const MatrixXd uty = u.transpose() * y;
  const MatrixXd u_sq = u.array().square().matrix();
  double best_error = std::numeric_limits<double>::infinity();
  for (double alpha : options.alphas) {
    const VectorXd shrink = eig.array() / (eig.array() + alpha);
    const VectorXd hat = u_sq * shrink + VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    const MatrixXd fitted = u * (shrink.asDiagonal() * uty);
    const MatrixXd residual = y - fitted;
    double error = 0.0;
    for (Index r = 0; r < m; ++r) {
      const double denom = std::max(1.0 - hat(r), 1e-12);
      error += residual.row(r).squaredNorm() / (denom * denom);
    }
    if (error < best_error) {
      best_error = error;
      model.alpha = alpha;
    }
  }

  const VectorXd inverse = (eig.array() + model.alpha).inverse();
  const MatrixXd dual = u * (inverse.asDiagonal() * uty);
  model.coef = x.transpose() * dual;
  return model;
}

std::vector<int> stratified_folds(std::span<const Label> labels, std::size_t folds, RngSeed seed) {
  // Classes are visited in order of first occurrence and each draws its own
  // stream by that ordinal, so the assignment depends only on the partition,
  // not on the label values.
  std::map<Label, std::size_t> ordinal;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, inserted] = ordinal.emplace(labels[i], members.size());
    if (inserted) members.emplace_back();
    members[it->second].push_back(i);
  }
  Rng rng(seed, "folds");
  std::vector<int> fold_of(labels.size(), 0);
  std::size_t next = 0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    Rng class_rng = rng.split(static_cast<std::uint64_t>(c));
    class_rng.shuffle(members[c]);
    for (std::size_t r : members[c]) {
      fold_of[r] = static_cast<int>(next % folds) + 1;
      ++next;
    }
  }
  return fold_of;
}

CvPrediction cross_val_predict(const FeatureMatrix& features, std::span<const Label> labels,
                               std::size_t folds, RngSeed seed, const RidgeOptions& options) {
  if (labels.size() != static_cast<std::size_t>(features.rows())) {
    throw Error(ErrorKind::LengthMismatch, "feature rows and labels differ in count");
  }
  if (folds < 2) throw Error(ErrorKind::Config, "cross-validation needs at least 2 folds");
  std::map<Label, std::size_t> counts;
  for (Label l : labels) ++counts[l];
  if (counts.size() < 2) {
    throw Error(ErrorKind::DegenerateLabels, "cross-validation needs at least two classes");
  }

  CvPrediction result;
  result.fold_of = stratified_folds(labels, folds, seed);
  result.y_pred.assign(labels.size(), 0);
  result.provisional.assign(labels.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) result.provisional[i] = counts[labels[i]] == 1;

  for (std::size_t f = 1; f <= folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool held_out = static_cast<std::size_t>(result.fold_of[i]) == f;
      if (held_out) test.push_back(i);
      if (!held_out || result.provisional[i]) train.push_back(i);
    }
    if (test.empty()) continue;
    const RidgeModel model = fit_ridge(features, labels, train, options);
    for (std::size_t i : test) result.y_pred[i] = model.predict(features.row(static_cast<Eigen::Index>(i)));
  }
  return result;
}

}  // namespace clap
