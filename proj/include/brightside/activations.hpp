#pragma once

#include <cmath>
#include <concepts>

#include <Eigen/Core>

namespace brightside {

enum class Activation { Identity, Relu, Sigmoid };

template <std::floating_point Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return sigmoid(v); });
}

template <typename Derived>
auto relu(const Eigen::ArrayBase<Derived>& x) {
  return x.max(typename Derived::Scalar(0));
}

// Derivative of the activation written in terms of its output `a`.
template <typename Derived>
auto activation_grad_from_output(const Eigen::ArrayBase<Derived>& a, Activation act) {
  using Scalar = typename Derived::Scalar;
  using Plain = typename Derived::PlainObject;
  switch (act) {
    case Activation::Relu:
      return Plain((a > Scalar(0)).template cast<Scalar>());
    case Activation::Sigmoid:
      return Plain(a * (Scalar(1) - a));
    case Activation::Identity:
    default:
      return Plain(Plain::Ones(a.rows(), a.cols()));
  }
}

template <typename Derived>
typename Derived::PlainObject apply_activation(const Eigen::ArrayBase<Derived>& z,
                                               Activation act) {
  switch (act) {
    case Activation::Relu: return relu(z);
    case Activation::Sigmoid: return sigmoid(z);
    case Activation::Identity:
    default: return z;
  }
}

// Max-shifted softmax over a column vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar mx = logits.maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

inline constexpr double kProbClamp = 1e-7;

template <typename Scalar>
Scalar clamp_probability(Scalar p) {
  const Scalar lo = Scalar(kProbClamp);
  const Scalar hi = Scalar(1) - Scalar(kProbClamp);
  return p < lo ? lo : (p > hi ? hi : p);
}

// -(y ln p + (1-y) ln(1-p)) with p clamped to [1e-7, 1-1e-7].
template <typename Scalar>
Scalar bce_loss(Scalar p, int y) {
  using std::log;
  const Scalar q = clamp_probability(p);
  return y == 1 ? -log(q) : -log(Scalar(1) - q);
}

}  // namespace brightside
