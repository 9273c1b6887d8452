#include "brightside/svm.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "brightside/activations.hpp"
#include "brightside/error.hpp"
#include "brightside/training.hpp"

namespace brightside {

namespace {

double sparse_dot(const Eigen::VectorXd& w, const FeatureVector& x) {
  double s = 0.0;
  for (const auto& [i, v] : x.entries) s += w[i] * v;
  return s;
}

}  // namespace

double svm_decision(const SvmModel& model, const FeatureVector& x) {
  if (x.dimension != model.w.size())
    throw Error(Errc::ShapeError, "feature dimension does not match SVM weights");
  return sparse_dot(model.w, x);
}

double svm_score(const SvmModel& model, const FeatureVector& x) {
  return sigmoid(svm_decision(model, x));
}

SvmModel train_svm(std::span<const FeatureVector> xs, std::span<const int> ys,
                   const SvmTraining& opts) {
  if (xs.size() != ys.size()) throw Error(Errc::ShapeError, "examples and labels differ in length");
  if (!(opts.lambda > 0.0)) throw Error(Errc::InvalidArgument, "lambda must be positive");
  if (xs.empty()) throw Error(Errc::DegenerateData, "no training examples");
  require_both_classes(ys);
  const Index dim = xs.front().dimension;
  for (const auto& x : xs)
    if (x.dimension != dim) throw Error(Errc::ShapeError, "inconsistent feature dimensions");

  // w = scale * v keeps the shrink step O(1) for sparse inputs.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  double scale = 1.0;
  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::int64_t t = 0;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    if (opts.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (opts.lambda * static_cast<double>(t));
      const double y = ys[i] == 1 ? 1.0 : -1.0;
      const double margin = y * scale * sparse_dot(v, xs[i]);
      const double shrink = 1.0 - eta * opts.lambda;
      if (shrink == 0.0) {
        v.setZero();
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (margin < 1.0) {
        for (const auto& [j, xv] : xs[i].entries) v[j] += eta * y * xv / scale;
      }
      if (scale < 1e-9) {
        v *= scale;
        scale = 1.0;
      }
    }
  }

  SvmModel model;
  model.w = scale * v;
  model.lambda = opts.lambda;
  model.epochs_trained = opts.epochs;
  return model;
}

double svm_objective(const Eigen::VectorXd& w, std::span<const FeatureVector> xs,
                     std::span<const int> ys, double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = ys[i] == 1 ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * sparse_dot(w, xs[i]));
  }
  const double mean = xs.empty() ? 0.0 : hinge / static_cast<double>(xs.size());
  return 0.5 * lambda * w.squaredNorm() + mean;
}

}  // namespace brightside
