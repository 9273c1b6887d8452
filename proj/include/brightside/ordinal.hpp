#pragma once

#include <array>
#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "brightside/features.hpp"
#include "brightside/optim.hpp"
#include "brightside/training.hpp"

namespace brightside {

inline constexpr int kRatingLevels = 5;

using RatingProbs = std::array<double, kRatingLevels>;

// Multinomial logistic rater over five classes; class k means rating k+1.
struct OrdinalModel {
  Eigen::MatrixXd W;  // [5 x dimension]
  Eigen::VectorXd b;  // [5]

  Index dimension() const { return W.cols(); }
};

using OrdinalGradient = OrdinalModel;

OrdinalModel make_ordinal(Index dimension);  // all zeros
ParamRefs parameters(OrdinalModel& m);
OrdinalModel zeros_like(const OrdinalModel& m);

struct Rating {
  int rating = 1;
  RatingProbs probs{};
};

// Softmax probabilities and the argmax rating; ties go to the lowest rating.
Rating rate(const OrdinalModel& model, const FeatureVector& x);

// Probability mass on ratings >= min_rating.
double mass_at_or_above(const RatingProbs& probs, int min_rating);

struct StrictPolicy {
  int min_rating = 4;
  double min_mass = 0.8;
};

void validate(const StrictPolicy& policy);

// rating >= min_rating and mass(>= min_rating) >= min_mass.
bool accept(int rating, const RatingProbs& probs, const StrictPolicy& policy);

// Softmax cross entropy of the true rating (1..5).
double ordinal_loss(const OrdinalModel& model, const FeatureVector& x, int rating);
double ordinal_accumulate_gradient(const OrdinalModel& model, const FeatureVector& x, int rating,
                                   OrdinalGradient& grad);

// Throws Errc::DegenerateData unless at least two distinct ratings appear.
OrdinalModel train_ordinal(std::span<const FeatureVector> xs, std::span<const int> ratings,
                           const TrainConfig& cfg, TrainReport* report = nullptr);

}  // namespace brightside
