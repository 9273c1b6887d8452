#include <doctest.h>

#include <cmath>
#include <random>

#include "brightside/mlp.hpp"
#include "testkit.hpp"

using namespace brightside;

namespace {

FeatureVector random_features(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> d(static_cast<std::size_t>(dim));
  for (auto& v : d) v = n(rng);
  return bt::features_of(d);
}

// Two gaussian blobs on either side of x0 + x1 = 0, third coordinate a bias.
void toy_set(std::vector<FeatureVector>& xs, std::vector<int>& ys) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < 20; ++i) {
    const int y = i % 2;
    const double s = y == 1 ? 1.0 : -1.0;
    xs.push_back(bt::features_of({s * u(rng), s * u(rng), 1.0}));
    ys.push_back(y);
  }
}

}  // namespace

TEST_CASE("mlp_forward examples") {
  Mlp zero = make_mlp(5, std::vector<Index>{4, 3}, 1);
  for (auto& p : parameters(zero)) p.setZero();
  std::mt19937_64 rng(3);
  CHECK(mlp_forward(zero, random_features(5, rng)) == 0.5);

  Mlp one = make_mlp(1, std::vector<Index>{}, 1);
  one.layers[0].W(0, 0) = 1.0;
  one.layers[0].b(0) = 0.0;
  CHECK(mlp_forward(one, bt::features_of({0.0})) == 0.5);

  Mlp net = make_mlp(6, std::vector<Index>{5, 4}, 11);
  auto x = random_features(6, rng);
  const double p = mlp_forward(net, x);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  CHECK(mlp_forward(net, x) == p);
  CHECK(mlp_forward(make_mlp(6, std::vector<Index>{5, 4}, 11), x) == p);

  CHECK(bt::error_code([&] { mlp_forward(net, bt::features_of({1.0, 2.0})); }) == Errc::ShapeError);
}

TEST_CASE("default architecture") {
  Mlp m = make_mlp(10, kDefaultMlpWidths, 1);
  REQUIRE(m.layers.size() == 7);
  for (std::size_t i = 0; i < 6; ++i) CHECK(m.layers[i].activation == Activation::Relu);
  CHECK(m.layers[6].activation == Activation::Sigmoid);
  CHECK(m.layers[6].W.rows() == 1);
  CHECK(m.layers[0].W.rows() == 256);
  CHECK(m.input_dim() == 10);
}

TEST_CASE("bce_loss") {
  CHECK(bce_loss(0.5, 1) == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(bce_loss(0.5, 0) == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(bce_loss(1.0 - 1e-7, 1) == doctest::Approx(1e-7).epsilon(1e-3));
  CHECK(std::isfinite(bce_loss(0.0, 1)));
  CHECK(std::isfinite(bce_loss(1.0, 0)));
  CHECK(bce_loss(1.0, 1) >= 0.0);
}

TEST_CASE("mlp_backward matches central differences") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Mlp m = make_mlp(4, std::vector<Index>{4, 3}, seed);
    std::size_t n_params = 0;
    for (auto& p : parameters(m)) n_params += static_cast<std::size_t>(p.size());
    REQUIRE(n_params <= 50);
    std::mt19937_64 rng(seed * 97);
    for (auto& l : m.layers) l.b = Eigen::VectorXd::Random(l.b.size()) * 0.1;
    const auto x = random_features(4, rng);
    const int y = static_cast<int>(seed % 2);
    MlpGradient g = mlp_backward(m, x, y);
    auto res = bt::check_gradient(parameters(m), parameters(g), [&] { return mlp_loss(m, x, y); });
    CHECK(res.coords == n_params);
    CHECK(res.max_rel_error < 1e-4);
  }
}

TEST_CASE("mlp_backward limit and zero input") {
  Mlp m = make_mlp(3, std::vector<Index>{}, 1);
  m.layers[0].W.setZero();
  m.layers[0].b(0) = 20.0;
  const auto x = bt::features_of({0.3, -0.2, 1.0});
  REQUIRE(mlp_forward(m, x) >= 1.0 - 1e-6);
  MlpGradient g = mlp_backward(m, x, 1);
  double sq = 0.0;
  for (auto& p : parameters(g)) sq += p.squaredNorm();
  CHECK(std::sqrt(sq) <= 1e-5);

  Mlp net = make_mlp(3, std::vector<Index>{4}, 2);
  for (auto& l : net.layers) l.b.setConstant(0.1);
  FeatureVector zero;
  zero.dimension = 3;
  MlpGradient gz = mlp_backward(net, zero, 1);
  CHECK(gz.layers[0].W.cwiseAbs().maxCoeff() == 0.0);
  CHECK(gz.layers[0].b.cwiseAbs().maxCoeff() > 0.0);
  CHECK(gz.layers[1].b.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("adam_step closed form") {
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(1, 2);
  Eigen::MatrixXd grad(1, 2);
  grad << 1.0, 1000.0;
  AdamState st;
  ParamRefs p{theta};
  ConstParamRefs g{grad};
  adam_step(p, g, st);
  const AdamHyper h;
  CHECK(st.t == 1);
  CHECK(std::abs(theta(0, 0) - (-h.alpha * 1.0 / (1.0 + h.eps))) < 1e-12);
  CHECK(std::abs(theta(0, 1) - (-h.alpha * 1000.0 / (1000.0 + h.eps))) < 1e-12);

  // second step, oracle from the recurrences
  Eigen::MatrixXd g2(1, 2);
  g2 << -0.5, 2.0;
  ConstParamRefs gg{g2};
  const double m1 = 0.1 * 1.0, v1 = 0.001 * 1.0;
  const double m2 = 0.9 * m1 + 0.1 * -0.5, v2 = 0.999 * v1 + 0.001 * 0.25;
  const double mh = m2 / (1 - 0.9 * 0.9), vh = v2 / (1 - 0.999 * 0.999);
  const double expected = theta(0, 0) - h.alpha * mh / (std::sqrt(vh) + h.eps);
  adam_step(p, gg, st);
  CHECK(std::abs(theta(0, 0) - expected) < 1e-12);

  Eigen::MatrixXd still = Eigen::MatrixXd::Constant(2, 2, 0.7);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  AdamState fresh;
  ParamRefs sp{still};
  ConstParamRefs zg{zero};
  for (int i = 0; i < 3; ++i) adam_step(sp, zg, fresh);
  CHECK(still == Eigen::MatrixXd::Constant(2, 2, 0.7));

  Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(3, 1);
  ConstParamRefs wg{wrong};
  CHECK(bt::error_code([&] { adam_step(sp, wg, fresh); }) == Errc::ShapeError);
}

TEST_CASE("full-batch gradient descent is monotone") {
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  toy_set(xs, ys);
  Mlp m = make_mlp(3, std::vector<Index>{6, 4}, 9);
  auto batch_loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += mlp_loss(m, xs[i], ys[i]);
    return s / static_cast<double>(xs.size());
  };
  double prev = batch_loss();
  for (int step = 0; step < 50; ++step) {
    MlpGradient g = zeros_like(m);
    for (std::size_t i = 0; i < xs.size(); ++i) mlp_accumulate_gradient(m, xs[i], ys[i], g);
    auto gr = parameters(g);
    for (auto& t : gr) t /= static_cast<double>(xs.size());
    auto pr = parameters(m);
    auto cg = const_refs(gr);
    gd_step(pr, cg, 1e-4);
    const double cur = batch_loss();
    CHECK(cur <= prev + 1e-9);
    prev = cur;
  }
}

TEST_CASE("train_mlp on a separable toy set") {
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  toy_set(xs, ys);
  MlpTraining opts;
  opts.hidden_widths = {8};
  opts.train.max_epochs = 200;
  opts.train.early_stop_patience = 200;
  opts.train.validation_fraction = 0.0;
  opts.train.batch_size = 4;
  opts.train.adam.alpha = 0.01;
  opts.train.seed = 3;
  TrainReport r;
  Mlp m = train_mlp(xs, ys, opts, &r);
  CHECK(r.train_accuracy == 1.0);
  CHECK(r.epochs_run <= 200);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK((mlp_forward(m, xs[i]) >= 0.5 ? 1 : 0) == ys[i]);

  Mlp again = train_mlp(xs, ys, opts);
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    CHECK(m.layers[k].W == again.layers[k].W);
    CHECK(m.layers[k].b == again.layers[k].b);
  }
}

TEST_CASE("train_mlp rejects degenerate data") {
  std::vector<FeatureVector> xs = {bt::features_of({1.0, 1.0}), bt::features_of({2.0, 1.0})};
  std::vector<int> ones = {1, 1};
  CHECK(bt::error_code([&] { train_mlp(xs, ones, MlpTraining{}); }) == Errc::DegenerateData);
  std::vector<FeatureVector> single = {xs[0]};
  std::vector<int> one = {1};
  CHECK(bt::error_code([&] { train_mlp(single, one, MlpTraining{}); }) == Errc::DegenerateData);
}
