#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "brightside/activations.hpp"
#include "brightside/features.hpp"
#include "brightside/optim.hpp"
#include "brightside/training.hpp"

namespace brightside {

struct DenseLayer {
  Eigen::MatrixXd W;  // [out x in]
  Eigen::VectorXd b;  // [out]
  Activation activation = Activation::Relu;
};

// Feed-forward classifier: ReLU hidden layers and a single sigmoid unit. The
// first layer reads a sparse TF-IDF vector directly.
struct Mlp {
  std::vector<DenseLayer> layers;

  Index input_dim() const { return layers.empty() ? 0 : layers.front().W.cols(); }
};

// Gradients share the model's layout.
using MlpGradient = Mlp;

inline const std::vector<Index> kDefaultMlpWidths = {256, 128, 64, 32, 16, 8};

// He-normal for ReLU layers, Xavier-normal for the sigmoid output, zero
// biases.
Mlp make_mlp(Index input_dim, std::span<const Index> hidden_widths, std::uint64_t seed);

ParamRefs parameters(Mlp& model);
Mlp zeros_like(const Mlp& model);

// Throws Errc::ShapeError when x.dimension != input_dim.
double mlp_forward(const Mlp& model, const FeatureVector& x);

// Adds dL/dθ of bce_loss(mlp_forward(x), y) into `grad`, returns the loss.
double mlp_accumulate_gradient(const Mlp& model, const FeatureVector& x, int y,
                               MlpGradient& grad);

MlpGradient mlp_backward(const Mlp& model, const FeatureVector& x, int y);

double mlp_loss(const Mlp& model, const FeatureVector& x, int y);

struct MlpTraining {
  std::vector<Index> hidden_widths = kDefaultMlpWidths;
  TrainConfig train;
};

// Throws Errc::DegenerateData when fewer than two examples or one class only.
Mlp train_mlp(std::span<const FeatureVector> xs, std::span<const int> ys,
              const MlpTraining& opts, TrainReport* report = nullptr);

}  // namespace brightside
