#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "brightside/activations.hpp"
#include "brightside/features.hpp"
#include "brightside/optim.hpp"
#include "brightside/training.hpp"

namespace brightside {

// Gate blocks in the stacked weight matrix, top to bottom.
enum class Gate : Index { Input = 0, Forget = 1, Cell = 2, Output = 3 };

// Embedding -> one LSTM layer -> dropout -> dense ReLU -> sigmoid unit.
//
// The four gate matrices are stacked row-wise in `W` ([4h x (d_e + h)],
// acting on [x_t; h_{t-1}]) so a step is one matrix-vector product.
// Row 0 of `embedding` is the padding row and stays zero.
struct LstmParams {
  Eigen::MatrixXd embedding;  // [index_space x d_e]
  Eigen::MatrixXd W;          // [4h x (d_e + h)]
  Eigen::VectorXd b;          // [4h]
  Eigen::MatrixXd W_head;     // [head x h]
  Eigen::VectorXd b_head;     // [head]
  Eigen::MatrixXd W_out;      // [1 x head]
  Eigen::VectorXd b_out;      // [1]
  double dropout_rate = 0.5;

  Index hidden() const { return b.size() / 4; }
  Index embed_dim() const { return embedding.cols(); }
  Index index_space() const { return embedding.rows(); }

  auto gate_weights(Gate g) { return W.middleRows(static_cast<Index>(g) * hidden(), hidden()); }
  auto gate_weights(Gate g) const {
    return W.middleRows(static_cast<Index>(g) * hidden(), hidden());
  }
  auto gate_bias(Gate g) { return b.segment(static_cast<Index>(g) * hidden(), hidden()); }
  auto gate_bias(Gate g) const { return b.segment(static_cast<Index>(g) * hidden(), hidden()); }
};

using LstmGradient = LstmParams;

struct LstmShape {
  Index index_space = 0;
  Index embed_dim = 64;
  Index hidden = 64;
  Index head = 32;
  double dropout_rate = 0.5;
};

// Xavier-uniform weights, zero biases except the forget gate (+1), small
// uniform embeddings with a zero padding row.
LstmParams make_lstm(const LstmShape& shape, std::uint64_t seed);

ParamRefs parameters(LstmParams& p);
LstmParams zeros_like(const LstmParams& p);

// Gate activations and state of one step.
struct LstmStep {
  Eigen::VectorXd i, f, g, o, c, tanh_c, h;
};

template <typename X, typename H, typename C>
LstmStep lstm_step(const Eigen::MatrixBase<X>& x, const Eigen::MatrixBase<H>& h_prev,
                   const Eigen::MatrixBase<C>& c_prev, const Eigen::MatrixXd& W,
                   const Eigen::VectorXd& b) {
  const Index hd = b.size() / 4;
  const Index dx = x.size();
  Eigen::VectorXd a = b;
  a.noalias() += W.leftCols(dx) * x;
  a.noalias() += W.rightCols(hd) * h_prev;
  LstmStep s;
  s.i = sigmoid(a.segment(0, hd).array()).matrix();
  s.f = sigmoid(a.segment(hd, hd).array()).matrix();
  s.g = a.segment(2 * hd, hd).array().tanh().matrix();
  s.o = sigmoid(a.segment(3 * hd, hd).array()).matrix();
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.tanh_c = s.c.array().tanh().matrix();
  s.h = s.o.cwiseProduct(s.tanh_c);
  return s;
}

// (h_t, c_t). Throws Errc::ShapeError on inconsistent dimensions.
std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_cell(const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& h_prev,
                                                      const Eigen::VectorXd& c_prev,
                                                      const LstmParams& params);

enum class Mode { Train, Infer };

// Cached activations of one forward pass, consumed by lstm_backward().
class LstmTrace {
 public:
  bool valid() const noexcept { return valid_; }
  double probability() const noexcept { return p_; }
  std::size_t steps() const noexcept { return steps_.size(); }

 private:
  friend LstmTrace lstm_forward(const LstmParams&, const TokenSequence&, Mode,
                                std::mt19937_64*);
  friend double lstm_backward(const LstmParams&, LstmTrace&&, int, LstmGradient&, double);

  bool valid_ = false;
  std::vector<Index> tokens_;
  std::vector<Eigen::VectorXd> c_prev_;
  std::vector<Eigen::VectorXd> h_prev_;
  std::vector<LstmStep> steps_;
  Eigen::VectorXd mask_;     // already scaled by 1/(1-rate)
  Eigen::VectorXd dropped_;  // h_L after dropout
  Eigen::VectorXd head_;     // ReLU head output
  double p_ = 0.5;
};

// Train mode applies inverted dropout drawn from `rng` (required when the
// rate is positive); Infer mode is deterministic.
LstmTrace lstm_forward(const LstmParams& params, const TokenSequence& seq, Mode mode,
                       std::mt19937_64* rng = nullptr);

double lstm_predict(const LstmParams& params, const TokenSequence& seq,
                    Mode mode = Mode::Infer, std::mt19937_64* rng = nullptr);

inline constexpr double kLstmClipNorm = 5.0;

// Full BPTT of the BCE loss. The per-example gradient is clipped to global
// norm `max_norm` and added into `grad`; returns the loss. The padding row of
// the embedding never receives gradient. Throws Errc::StateError when the
// trace is empty or already consumed.
double lstm_backward(const LstmParams& params, LstmTrace&& trace, int y, LstmGradient& grad,
                     double max_norm = kLstmClipNorm);

double lstm_loss(const LstmParams& params, const TokenSequence& seq, int y);

struct LstmTraining {
  LstmShape shape;
  TrainConfig train;
  double clip_norm = kLstmClipNorm;
};

LstmParams train_lstm(std::span<const TokenSequence> xs, std::span<const int> ys,
                      const LstmTraining& opts, TrainReport* report = nullptr);

}  // namespace brightside
