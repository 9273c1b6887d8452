#include "brightside/ordinal.hpp"

#include <cmath>
#include <set>

#include "brightside/activations.hpp"
#include "brightside/error.hpp"

namespace brightside {

namespace {

Eigen::VectorXd logits(const OrdinalModel& m, const FeatureVector& x) {
  if (x.dimension != m.dimension())
    throw Error(Errc::ShapeError, "feature dimension does not match ordinal model");
  Eigen::VectorXd z = m.b;
  for (const auto& [j, v] : x.entries) z.noalias() += m.W.col(j) * v;
  return z;
}

void check_rating(int rating) {
  if (rating < 1 || rating > kRatingLevels)
    throw Error(Errc::InvalidArgument, "rating must lie in [1,5]");
}

}  // namespace

OrdinalModel make_ordinal(Index dimension) {
  return {Eigen::MatrixXd::Zero(kRatingLevels, dimension), Eigen::VectorXd::Zero(kRatingLevels)};
}

ParamRefs parameters(OrdinalModel& m) {
  ParamRefs refs;
  refs.emplace_back(m.W);
  refs.emplace_back(m.b);
  return refs;
}

OrdinalModel zeros_like(const OrdinalModel& m) { return make_ordinal(m.dimension()); }

Rating rate(const OrdinalModel& model, const FeatureVector& x) {
  const Eigen::VectorXd p = softmax(logits(model, x));
  Rating r;
  int best = 0;
  for (int k = 0; k < kRatingLevels; ++k) {
    r.probs[static_cast<std::size_t>(k)] = p[k];
    if (p[k] > p[best]) best = k;
  }
  r.rating = best + 1;
  return r;
}

double mass_at_or_above(const RatingProbs& probs, int min_rating) {
  double m = 0.0;
  for (int k = std::max(min_rating, 1); k <= kRatingLevels; ++k)
    m += probs[static_cast<std::size_t>(k - 1)];
  return m;
}

void validate(const StrictPolicy& policy) {
  if (policy.min_rating < 1 || policy.min_rating > kRatingLevels)
    throw Error(Errc::ConfigError, "min_rating must lie in [1,5]");
  if (!(policy.min_mass >= 0.0 && policy.min_mass <= 1.0))
    throw Error(Errc::ConfigError, "min_mass must lie in [0,1]");
}

bool accept(int rating, const RatingProbs& probs, const StrictPolicy& policy) {
  return rating >= policy.min_rating && mass_at_or_above(probs, policy.min_rating) >= policy.min_mass;
}

double ordinal_loss(const OrdinalModel& model, const FeatureVector& x, int rating) {
  check_rating(rating);
  const Eigen::VectorXd z = logits(model, x);
  const double mx = z.maxCoeff();
  const double lse = mx + std::log((z.array() - mx).exp().sum());
  return lse - z[rating - 1];
}

double ordinal_accumulate_gradient(const OrdinalModel& model, const FeatureVector& x, int rating,
                                   OrdinalGradient& grad) {
  check_rating(rating);
  const Eigen::VectorXd z = logits(model, x);
  Eigen::VectorXd d = softmax(z);
  const double loss = -std::log(std::max(d[rating - 1], 1e-300));
  d[rating - 1] -= 1.0;
  grad.b += d;
  for (const auto& [j, v] : x.entries) grad.W.col(j) += d * v;
  return loss;
}

OrdinalModel train_ordinal(std::span<const FeatureVector> xs, std::span<const int> ratings,
                           const TrainConfig& cfg, TrainReport* report) {
  if (xs.size() != ratings.size())
    throw Error(Errc::ShapeError, "examples and labels differ in length");
  std::set<int> classes;
  for (int r : ratings) {
    check_rating(r);
    classes.insert(r);
  }
  if (xs.size() < 2 || classes.size() < 2)
    throw Error(Errc::DegenerateData, "need at least two distinct ratings");
  const Index dim = xs.front().dimension;
  for (const auto& x : xs)
    if (x.dimension != dim) throw Error(Errc::ShapeError, "inconsistent feature dimensions");

  TrainHooks<OrdinalModel> hooks;
  hooks.params = &parameters;
  hooks.zero_like = &zeros_like;
  hooks.accumulate = [&](const OrdinalModel& m, std::size_t i, OrdinalModel& g, std::mt19937_64&) {
    return ordinal_accumulate_gradient(m, xs[i], ratings[i], g);
  };
  hooks.eval_loss = [&](const OrdinalModel& m, std::size_t i) {
    return ordinal_loss(m, xs[i], ratings[i]);
  };
  hooks.correct = [&](const OrdinalModel& m, std::size_t i) {
    return rate(m, xs[i]).rating == ratings[i];
  };

  TrainReport local;
  OrdinalModel best = fit(make_ordinal(dim), xs.size(), cfg, hooks, local);
  if (report) *report = std::move(local);
  return best;
}

}  // namespace brightside
