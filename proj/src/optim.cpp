#include "brightside/optim.hpp"

#include <limits>

#include "brightside/error.hpp"

namespace brightside {

namespace {

void check_shapes(std::span<Eigen::Ref<Eigen::MatrixXd>> params,
                  std::span<const Eigen::Ref<const Eigen::MatrixXd>> grads) {
  if (params.size() != grads.size())
    throw Error(Errc::ShapeError, "parameter and gradient counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows() != grads[i].rows() || params[i].cols() != grads[i].cols())
      throw Error(Errc::ShapeError, "gradient shape does not match parameter");
  }
}

}  // namespace

void adam_step(std::span<Eigen::Ref<Eigen::MatrixXd>> params,
               std::span<const Eigen::Ref<const Eigen::MatrixXd>> grads, AdamState& state) {
  check_shapes(params, grads);
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
      state.v.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    }
  }
  if (state.m.size() != params.size())
    throw Error(Errc::ShapeError, "optimizer state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].rows() != params[i].rows() || state.m[i].cols() != params[i].cols())
      throw Error(Errc::ShapeError, "optimizer moment shape does not match parameter");
  }

  ++state.t;
  for (std::size_t i = 0; i < params.size(); ++i)
    adam_update(params[i], grads[i], state.m[i], state.v[i], state.t, state.hyper);
}

void gd_step(std::span<Eigen::Ref<Eigen::MatrixXd>> params,
             std::span<const Eigen::Ref<const Eigen::MatrixXd>> grads, double lr) {
  check_shapes(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

double global_norm(std::span<const Eigen::Ref<const Eigen::MatrixXd>> grads) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(std::span<Eigen::Ref<Eigen::MatrixXd>> grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && std::isfinite(max_norm)) {
    const double scale = max_norm / norm;
    for (auto& g : grads) g *= scale;
  }
  return norm;
}

}  // namespace brightside
