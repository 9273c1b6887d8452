#include "brightside/lstm.hpp"

#include <cmath>
#include <limits>

#include "brightside/error.hpp"

namespace brightside {

namespace {

void check_sequence(const LstmParams& p, const TokenSequence& seq) {
  for (Index t : seq.indices)
    if (t < 0 || t >= p.index_space())
      throw Error(Errc::ShapeError, "token index outside embedding table");
}

}  // namespace

LstmParams make_lstm(const LstmShape& shape, std::uint64_t seed) {
  if (shape.index_space < kFirstTokenIndex || shape.embed_dim < 1 || shape.hidden < 1 ||
      shape.head < 1)
    throw Error(Errc::ShapeError, "invalid LSTM shape");
  std::mt19937_64 rng(seed);
  auto uniform = [&](Index rows, Index cols, double limit) {
    std::uniform_real_distribution<double> d(-limit, limit);
    return Eigen::MatrixXd(Eigen::MatrixXd::NullaryExpr(rows, cols, [&]() { return d(rng); }));
  };
  const Index h = shape.hidden;
  LstmParams p;
  p.embedding = uniform(shape.index_space, shape.embed_dim, 0.05);
  p.embedding.row(kPadIndex).setZero();
  p.W = uniform(4 * h, shape.embed_dim + h,
                std::sqrt(6.0 / static_cast<double>(shape.embed_dim + h + h)));
  p.b = Eigen::VectorXd::Zero(4 * h);
  p.gate_bias(Gate::Forget).setOnes();
  p.W_head = uniform(shape.head, h, std::sqrt(6.0 / static_cast<double>(h)));
  p.b_head = Eigen::VectorXd::Zero(shape.head);
  p.W_out = uniform(1, shape.head, std::sqrt(6.0 / static_cast<double>(shape.head + 1)));
  p.b_out = Eigen::VectorXd::Zero(1);
  p.dropout_rate = shape.dropout_rate;
  return p;
}

ParamRefs parameters(LstmParams& p) {
  ParamRefs refs;
  refs.emplace_back(p.embedding);
  refs.emplace_back(p.W);
  refs.emplace_back(p.b);
  refs.emplace_back(p.W_head);
  refs.emplace_back(p.b_head);
  refs.emplace_back(p.W_out);
  refs.emplace_back(p.b_out);
  return refs;
}

LstmParams zeros_like(const LstmParams& p) {
  LstmParams z = p;
  for (auto& r : parameters(z)) r.setZero();
  return z;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> lstm_cell(const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& h_prev,
                                                      const Eigen::VectorXd& c_prev,
                                                      const LstmParams& params) {
  const Index h = params.hidden();
  if (x.size() != params.embed_dim() || h_prev.size() != h || c_prev.size() != h ||
      params.W.rows() != 4 * h || params.W.cols() != x.size() + h)
    throw Error(Errc::ShapeError, "LSTM cell dimensions are inconsistent");
  auto s = lstm_step(x, h_prev, c_prev, params.W, params.b);
  return {std::move(s.h), std::move(s.c)};
}

LstmTrace lstm_forward(const LstmParams& params, const TokenSequence& seq, Mode mode,
                       std::mt19937_64* rng) {
  check_sequence(params, seq);
  const Index h = params.hidden();
  if (params.W.rows() != 4 * h || params.W.cols() != params.embed_dim() + h ||
      params.W_head.cols() != h || params.W_out.cols() != params.W_head.rows())
    throw Error(Errc::ShapeError, "LSTM parameter shapes are inconsistent");

  LstmTrace tr;
  tr.tokens_ = seq.indices;
  Eigen::VectorXd hs = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(h);
  tr.steps_.reserve(seq.indices.size());
  for (Index tok : seq.indices) {
    tr.h_prev_.push_back(hs);
    tr.c_prev_.push_back(cs);
    auto step = lstm_step(params.embedding.row(tok).transpose(), hs, cs, params.W, params.b);
    hs = step.h;
    cs = step.c;
    tr.steps_.push_back(std::move(step));
  }

  tr.mask_ = Eigen::VectorXd::Ones(h);
  if (mode == Mode::Train && params.dropout_rate > 0.0) {
    if (rng == nullptr) throw Error(Errc::StateError, "train-mode dropout needs a generator");
    std::bernoulli_distribution keep(1.0 - params.dropout_rate);
    const double scale = 1.0 / (1.0 - params.dropout_rate);
    for (Index k = 0; k < h; ++k) tr.mask_[k] = keep(*rng) ? scale : 0.0;
  }
  tr.dropped_ = hs.cwiseProduct(tr.mask_);
  Eigen::VectorXd z1 = params.b_head;
  z1.noalias() += params.W_head * tr.dropped_;
  tr.head_ = relu(z1.array()).matrix();
  const double logit = params.b_out[0] + params.W_out.row(0).dot(tr.head_);
  tr.p_ = sigmoid(logit);
  tr.valid_ = true;
  return tr;
}

double lstm_predict(const LstmParams& params, const TokenSequence& seq, Mode mode,
                    std::mt19937_64* rng) {
  return lstm_forward(params, seq, mode, rng).probability();
}

double lstm_loss(const LstmParams& params, const TokenSequence& seq, int y) {
  return bce_loss(lstm_predict(params, seq, Mode::Infer), y);
}

double lstm_backward(const LstmParams& params, LstmTrace&& trace, int y, LstmGradient& grad,
                     double max_norm) {
  if (!trace.valid_) throw Error(Errc::StateError, "no forward trace to differentiate");
  trace.valid_ = false;

  LstmGradient g = zeros_like(params);
  const Index h = params.hidden();
  const Index dx = params.embed_dim();

  // Head.
  const double dlogit = trace.p_ - static_cast<double>(y);
  g.b_out[0] = dlogit;
  g.W_out.row(0) = dlogit * trace.head_.transpose();
  Eigen::VectorXd dz1 = (params.W_out.row(0).transpose() * dlogit).cwiseProduct(
      (trace.head_.array() > 0.0).cast<double>().matrix());
  g.b_head = dz1;
  g.W_head.noalias() = dz1 * trace.dropped_.transpose();
  Eigen::VectorXd dh = (params.W_head.transpose() * dz1).cwiseProduct(trace.mask_);
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(h);

  // Through time.
  Eigen::VectorXd da(4 * h);
  Eigen::VectorXd xh(dx + h);
  for (std::size_t t = trace.steps_.size(); t-- > 0;) {
    const auto& s = trace.steps_[t];
    const auto& c_prev = trace.c_prev_[t];
    dc += dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix());
    const Eigen::VectorXd d_o = dh.cwiseProduct(s.tanh_c);
    const Eigen::VectorXd d_i = dc.cwiseProduct(s.g);
    const Eigen::VectorXd d_g = dc.cwiseProduct(s.i);
    const Eigen::VectorXd d_f = dc.cwiseProduct(c_prev);

    da.segment(0, h) = d_i.array() * s.i.array() * (1.0 - s.i.array());
    da.segment(h, h) = d_f.array() * s.f.array() * (1.0 - s.f.array());
    da.segment(2 * h, h) = d_g.array() * (1.0 - s.g.array().square());
    da.segment(3 * h, h) = d_o.array() * s.o.array() * (1.0 - s.o.array());

    const Index tok = trace.tokens_[t];
    xh.head(dx) = params.embedding.row(tok).transpose();
    xh.tail(h) = trace.h_prev_[t];
    g.W.noalias() += da * xh.transpose();
    g.b += da;

    const Eigen::VectorXd dxh = params.W.transpose() * da;
    if (tok != kPadIndex) g.embedding.row(tok) += dxh.head(dx).transpose();
    dh = dxh.tail(h);
    dc = dc.cwiseProduct(s.f);
  }

  auto grefs = parameters(g);
  clip_global_norm(grefs, max_norm);
  auto acc = parameters(grad);
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += grefs[k];
  return bce_loss(trace.p_, y);
}

LstmParams train_lstm(std::span<const TokenSequence> xs, std::span<const int> ys,
                      const LstmTraining& opts, TrainReport* report) {
  if (xs.size() != ys.size()) throw Error(Errc::ShapeError, "examples and labels differ in length");
  if (xs.size() < 2) throw Error(Errc::DegenerateData, "need at least two examples");
  require_both_classes(ys);

  TrainHooks<LstmParams> hooks;
  hooks.params = &parameters;
  hooks.zero_like = &zeros_like;
  const double clip = opts.clip_norm;
  hooks.accumulate = [&, clip](const LstmParams& p, std::size_t i, LstmParams& g,
                               std::mt19937_64& rng) {
    return lstm_backward(p, lstm_forward(p, xs[i], Mode::Train, &rng), ys[i], g, clip);
  };
  hooks.eval_loss = [&](const LstmParams& p, std::size_t i) { return lstm_loss(p, xs[i], ys[i]); };
  hooks.correct = [&](const LstmParams& p, std::size_t i) {
    return (lstm_predict(p, xs[i]) >= 0.5 ? 1 : 0) == ys[i];
  };

  TrainReport local;
  LstmParams best = fit(make_lstm(opts.shape, opts.train.seed), xs.size(), opts.train, hooks, local);
  if (report) *report = std::move(local);
  return best;
}

}  // namespace brightside
