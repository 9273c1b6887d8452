#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "brightside/features.hpp"

namespace brightside {

// Linear SVM; the bias lives in the weight of the always-one feature.
struct SvmModel {
  Eigen::VectorXd w;
  double lambda = 1e-4;
  std::size_t epochs_trained = 0;
};

// Signed margin w . x. Throws Errc::ShapeError on dimension mismatch.
double svm_decision(const SvmModel& model, const FeatureVector& x);

// decision > 0; a zero margin is negative.
inline int svm_label(double decision) { return decision > 0.0 ? 1 : 0; }

// sigmoid(decision), comparable with the probabilistic stages.
double svm_score(const SvmModel& model, const FeatureVector& x);

struct SvmTraining {
  double lambda = 1e-4;
  std::size_t epochs = 10;
  std::uint64_t seed = 42;
  bool shuffle = true;  // false visits examples in input order every epoch
};

// Pegasos: at step t, eta = 1/(lambda t);
//   w <- (1 - eta lambda) w + eta y x   when y (w . x) < 1
//   w <- (1 - eta lambda) w             otherwise.
// Labels are {0,1}, mapped to {-1,+1}. Throws Errc::DegenerateData on
// single-class input and Errc::InvalidArgument for lambda <= 0.
SvmModel train_svm(std::span<const FeatureVector> xs, std::span<const int> ys,
                   const SvmTraining& opts);

// (lambda/2) |w|^2 + mean hinge over the set.
double svm_objective(const Eigen::VectorXd& w, std::span<const FeatureVector> xs,
                     std::span<const int> ys, double lambda);

}  // namespace brightside
