#include "brightside/mlp.hpp"

#include <cmath>
#include <random>

#include "brightside/error.hpp"

namespace brightside {

namespace {

void check_input(const Mlp& model, const FeatureVector& x) {
  if (model.layers.empty()) throw Error(Errc::ShapeError, "model has no layers");
  if (x.dimension != model.input_dim())
    throw Error(Errc::ShapeError, "feature dimension does not match model input");
}

// Pre-activations and activations of every layer for one input.
struct ForwardPass {
  std::vector<Eigen::VectorXd> a;  // a[k] = output of layer k
};

ForwardPass forward_pass(const Mlp& model, const FeatureVector& x) {
  check_input(model, x);
  ForwardPass fp;
  fp.a.reserve(model.layers.size());
  const auto& first = model.layers.front();
  Eigen::VectorXd z = first.b;
  for (const auto& [j, w] : x.entries) z.noalias() += first.W.col(j) * w;
  fp.a.push_back(apply_activation(z.array(), first.activation).matrix());
  for (std::size_t k = 1; k < model.layers.size(); ++k) {
    const auto& layer = model.layers[k];
    Eigen::VectorXd zk = layer.b;
    zk.noalias() += layer.W * fp.a.back();
    fp.a.push_back(apply_activation(zk.array(), layer.activation).matrix());
  }
  return fp;
}

}  // namespace

Mlp make_mlp(Index input_dim, std::span<const Index> hidden_widths, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mlp model;
  Index fan_in = input_dim;
  auto init = [&](Index out, Index in, double stddev, Activation act) {
    std::normal_distribution<double> dist(0.0, stddev);
    DenseLayer layer;
    layer.W = Eigen::MatrixXd::NullaryExpr(out, in, [&]() { return dist(rng); });
    layer.b = Eigen::VectorXd::Zero(out);
    layer.activation = act;
    model.layers.push_back(std::move(layer));
  };
  for (Index width : hidden_widths) {
    init(width, fan_in, std::sqrt(2.0 / static_cast<double>(fan_in)), Activation::Relu);
    fan_in = width;
  }
  init(1, fan_in, std::sqrt(2.0 / static_cast<double>(fan_in + 1)), Activation::Sigmoid);
  return model;
}

ParamRefs parameters(Mlp& model) {
  ParamRefs refs;
  for (auto& layer : model.layers) {
    refs.emplace_back(layer.W);
    refs.emplace_back(layer.b);
  }
  return refs;
}

Mlp zeros_like(const Mlp& model) {
  Mlp z = model;
  for (auto& layer : z.layers) {
    layer.W.setZero();
    layer.b.setZero();
  }
  return z;
}

double mlp_forward(const Mlp& model, const FeatureVector& x) {
  return forward_pass(model, x).a.back()[0];
}

double mlp_loss(const Mlp& model, const FeatureVector& x, int y) {
  return bce_loss(mlp_forward(model, x), y);
}

double mlp_accumulate_gradient(const Mlp& model, const FeatureVector& x, int y,
                               MlpGradient& grad) {
  const auto fp = forward_pass(model, x);
  const double p = fp.a.back()[0];

  // d bce / d logit for a sigmoid output.
  Eigen::VectorXd delta(1);
  delta[0] = p - static_cast<double>(y);

  for (std::size_t k = model.layers.size(); k-- > 0;) {
    const auto& layer = model.layers[k];
    auto& g = grad.layers[k];
    if (k + 1 < model.layers.size() || layer.activation != Activation::Sigmoid) {
      // delta currently holds dL/da_k; move through the activation.
      delta.array() *= activation_grad_from_output(fp.a[k].array(), layer.activation);
    }
    g.b += delta;
    if (k == 0) {
      for (const auto& [j, w] : x.entries) g.W.col(j) += delta * w;
    } else {
      g.W.noalias() += delta * fp.a[k - 1].transpose();
      delta = layer.W.transpose() * delta;
    }
  }
  return bce_loss(p, y);
}

MlpGradient mlp_backward(const Mlp& model, const FeatureVector& x, int y) {
  MlpGradient grad = zeros_like(model);
  mlp_accumulate_gradient(model, x, y, grad);
  return grad;
}

Mlp train_mlp(std::span<const FeatureVector> xs, std::span<const int> ys,
              const MlpTraining& opts, TrainReport* report) {
  if (xs.size() != ys.size()) throw Error(Errc::ShapeError, "examples and labels differ in length");
  if (xs.size() < 2) throw Error(Errc::DegenerateData, "need at least two examples");
  require_both_classes(ys);
  const Index dim = xs.front().dimension;
  for (const auto& x : xs)
    if (x.dimension != dim) throw Error(Errc::ShapeError, "inconsistent feature dimensions");

  TrainHooks<Mlp> hooks;
  hooks.params = &parameters;
  hooks.zero_like = &zeros_like;
  hooks.accumulate = [&](const Mlp& m, std::size_t i, Mlp& g, std::mt19937_64&) {
    return mlp_accumulate_gradient(m, xs[i], ys[i], g);
  };
  hooks.eval_loss = [&](const Mlp& m, std::size_t i) { return mlp_loss(m, xs[i], ys[i]); };
  hooks.correct = [&](const Mlp& m, std::size_t i) {
    return (mlp_forward(m, xs[i]) >= 0.5 ? 1 : 0) == ys[i];
  };

  TrainReport local;
  Mlp init = make_mlp(dim, opts.hidden_widths, opts.train.seed);
  Mlp best = fit(std::move(init), xs.size(), opts.train, hooks, local);
  if (report) *report = std::move(local);
  return best;
}

}  // namespace brightside
