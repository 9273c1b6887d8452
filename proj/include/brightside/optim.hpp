#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace brightside {

using ParamRefs = std::vector<Eigen::Ref<Eigen::MatrixXd>>;
using ConstParamRefs = std::vector<Eigen::Ref<const Eigen::MatrixXd>>;

struct AdamHyper {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  std::int64_t t = 0;
};

// One bias-corrected Adam update of a single tensor at (already incremented)
// step t.
template <typename P, typename G, typename M, typename V>
void adam_update(Eigen::MatrixBase<P>& param, const Eigen::MatrixBase<G>& grad,
                 Eigen::MatrixBase<M>& m, Eigen::MatrixBase<V>& v, std::int64_t t,
                 const AdamHyper& h) {
  using Scalar = typename P::Scalar;
  m = h.beta1 * m + (1.0 - h.beta1) * grad;
  v = h.beta2 * v + (1.0 - h.beta2) * grad.cwiseAbs2();
  const Scalar c1 = Scalar(1) - std::pow(Scalar(h.beta1), Scalar(t));
  const Scalar c2 = Scalar(1) - std::pow(Scalar(h.beta2), Scalar(t));
  param.array() -= h.alpha * (m.array() / c1) / ((v.array() / c2).sqrt() + h.eps);
}

// Increments state.t, then updates every tensor. Moments are created on the
// first call; any shape disagreement throws Errc::ShapeError.
void adam_step(std::span<Eigen::Ref<Eigen::MatrixXd>> params,
               std::span<const Eigen::Ref<const Eigen::MatrixXd>> grads, AdamState& state);

// Plain gradient descent, used by the loss-monotonicity checks.
void gd_step(std::span<Eigen::Ref<Eigen::MatrixXd>> params,
             std::span<const Eigen::Ref<const Eigen::MatrixXd>> grads, double lr);

double global_norm(std::span<const Eigen::Ref<const Eigen::MatrixXd>> grads);

// Rescales all tensors so the global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_global_norm(std::span<Eigen::Ref<Eigen::MatrixXd>> grads, double max_norm);

inline ConstParamRefs const_refs(const ParamRefs& refs) {
  ConstParamRefs out;
  out.reserve(refs.size());
  for (const auto& r : refs) out.emplace_back(r);
  return out;
}

}  // namespace brightside
