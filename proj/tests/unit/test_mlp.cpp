// Copyright 2026 The qlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>

#include "doctest.h"
#include "qlc/error.hpp"
#include "qlc/mlp.hpp"
#include "qlc/rng.hpp"

using namespace qlc;

namespace {

Normalizer unit_box(std::size_t n) { return Normalizer(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0)); }

struct WarningCapture {
  std::vector<std::string> seen;
  WarningCapture() {
    set_warning_sink([this](const std::string& m) { seen.push_back(m); });
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
};

}  // namespace

TEST_SUITE("mlp") {

TEST_CASE("initialization") {
  const auto a = mlp_init({4, 30, 30, 3}, 5);
  const auto b = mlp_init({4, 30, 30, 3}, 5);
  const auto c = mlp_init({4, 30, 30, 3}, 6);
  CHECK(a.parameters() == b.parameters());
  CHECK(a.parameters() != c.parameters());
  for (double w : a.weight(1)) CHECK(std::abs(w) <= 0.5);
  for (double v : a.bias(2)) CHECK(v == 0.0);
  const auto tiny = mlp_init({1, 1}, 1);
  CHECK(tiny.weight(0).size() == 1);
  CHECK(tiny.bias(0).size() == 1);
  CHECK_THROWS_AS(mlp_init({4, 0, 3}, 1), ValidationError);
  CHECK_THROWS_AS(mlp_init({4}, 1), ValidationError);
}

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(50.0) == doctest::Approx(1.0));
  CHECK(sigmoid(-50.0) == doctest::Approx(0.0));
  CHECK(sigmoid(1e6) == 1.0);
  CHECK(sigmoid(-1e6) == 0.0);
  const double h = 1e-6;
  CHECK((sigmoid(h) - sigmoid(-h)) / (2 * h) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("forward pass") {
  MlpNetwork zero({3, 4, 2});
  for (double v : mlp_forward(zero, std::vector<double>{0.3, -2.0, 5.0})) CHECK(v == 0.5);
  auto single = mlp_init({1, 1}, 1);
  single.weight(0)[0] = 1.0;
  CHECK(mlp_forward(single, std::vector<double>{0.0})[0] == 0.5);

  // (2,2,1) by hand: h = s(x W1 + b1), y = s(h W2 + b2)
  MlpNetwork net({2, 2, 1});
  const double w1[4] = {0.5, -1.0, 2.0, 0.25};  // rows: input 0, input 1
  std::copy(w1, w1 + 4, net.weight(0).begin());
  net.bias(0)[0] = 0.1;
  net.bias(0)[1] = -0.2;
  net.weight(1)[0] = 1.5;
  net.weight(1)[1] = -0.75;
  net.bias(1)[0] = 0.3;
  const double x0 = 0.4, x1 = -0.6;
  const double h0 = 1.0 / (1.0 + std::exp(-(x0 * 0.5 + x1 * 2.0 + 0.1)));
  const double h1 = 1.0 / (1.0 + std::exp(-(x0 * -1.0 + x1 * 0.25 - 0.2)));
  const double y = 1.0 / (1.0 + std::exp(-(h0 * 1.5 + h1 * -0.75 + 0.3)));
  CHECK(mlp_forward(net, std::vector<double>{x0, x1})[0] == doctest::Approx(y).epsilon(1e-15));
  RowMatrix batch(1, 2);
  batch(0, 0) = x0;
  batch(0, 1) = x1;
  CHECK(mlp_forward(net, batch)(0, 0) == doctest::Approx(y).epsilon(1e-14));
  CHECK_THROWS_AS(mlp_forward(net, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("mse") {
  const auto net = mlp_init({2, 3, 3}, 4);
  RowMatrix x(2, 2);
  x(0, 0) = 0.2;
  x(1, 1) = -0.7;
  const auto norm = unit_box(2);
  const RowMatrix out = mlp_forward(net, norm.apply(x));
  CHECK(mse(net, x, out, norm) == 0.0);
  RowMatrix one_x(1, 2), one_y(1, 3);
  const auto o = mlp_forward(net, norm.apply(one_x.row(0)));
  one_y(0, 0) = o[0] - 0.1;
  one_y(0, 1) = o[1];
  one_y(0, 2) = o[2];
  CHECK(mse(net, one_x, one_y, norm) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(mse(net, RowMatrix(0, 2), RowMatrix(0, 3), norm), ValidationError);
}

TEST_CASE("backprop matches central differences") {
  auto net = mlp_init({4, 5, 3}, 17);
  for (std::size_t l = 0; l < net.layers(); ++l)
    for (double& b : net.bias(l)) b = 0.3;
  Rng rng(8);
  RowMatrix x(10, 4), y(10, 3);
  for (double& v : x.data) v = rng.uniform(-1, 1);
  for (std::size_t i = 0; i < 10; ++i) y(i, rng.below(3)) = 1.0;
  const auto norm = unit_box(4);
  const auto grad = mse_gradient(net, x, y);
  const auto p = net.parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto q = p;
    q[i] = p[i] + 1e-5;
    net.set_parameters(q);
    const double up = mse(net, x, y, norm);
    q[i] = p[i] - 1e-5;
    net.set_parameters(q);
    const double down = mse(net, x, y, norm);
    const double fd = (up - down) / 2e-5;
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-12}));
  }
  net.set_parameters(p);
  CHECK(worst < 1e-5);
}

TEST_CASE("linearly separable toy set trains below 0.01") {
  Rng rng(12);
  RowMatrix x, y;
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    const bool positive = a + 0.5 * b > 0.2 ? true : a + 0.5 * b < -0.2 ? false : (i % 2 == 0);
    const double shift = positive ? 0.3 : -0.3;
    x.append(std::vector<double>{a + shift, b});
    y.append(positive ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0});
  }
  // Certificate of separability: a perceptron converges to a hyperplane
  // with positive margin on every point.
  double w[3] = {0, 0, 0};
  bool separated = false;
  for (int epoch = 0; epoch < 10000 && !separated; ++epoch) {
    separated = true;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double t = y(i, 0) > 0 ? 1.0 : -1.0;
      if (t * (w[0] * x(i, 0) + w[1] * x(i, 1) + w[2]) <= 0) {
        w[0] += t * x(i, 0);
        w[1] += t * x(i, 1);
        w[2] += t;
        separated = false;
      }
    }
  }
  REQUIRE(separated);
  const auto norm = Normalizer::fit(x);
  TrainConfig cfg;
  cfg.max_iters = 5000;
  cfg.eval_every = 100;
  const auto h = mlp_train(mlp_init({2, 5, 2}, 3), x, y, x, y, norm, cfg);
  CHECK(h.records.back().train_mse < 0.01);
  CHECK(success_rate(h.best, x, y, norm) == 1.0);
}

TEST_CASE("single sample is fitted with strictly decreasing accepted MSE") {
  RowMatrix x(1, 3), y(1, 2);
  x(0, 0) = 0.5;
  x(0, 2) = -0.2;
  y(0, 0) = 1.0;
  const auto norm = unit_box(3);
  TrainConfig cfg;
  cfg.max_iters = 3000;
  const auto h = mlp_train(mlp_init({3, 4, 2}, 9), x, y, x, y, norm, cfg);
  REQUIRE(h.accepted_mse.size() > 10);
  for (std::size_t i = 1; i < h.accepted_mse.size(); ++i) CHECK(h.accepted_mse[i] < h.accepted_mse[i - 1]);
  CHECK(h.accepted_mse.back() < 1e-4);
}

TEST_CASE("training is deterministic and keeps the best test snapshot") {
  Rng rng(30);
  RowMatrix x, y, tx, ty;
  for (int i = 0; i < 60; ++i) {
    const double a = rng.uniform(0, 1), b = rng.uniform(0, 1);
    std::vector<double> t(3, 0.0);
    t[(a > 0.5) + (b > 0.7)] = 1.0;
    (i < 40 ? x : tx).append(std::vector<double>{a, b});
    (i < 40 ? y : ty).append(t);
  }
  const auto norm = Normalizer::fit(x);
  TrainConfig cfg;
  cfg.max_iters = 400;
  cfg.eval_every = 20;
  const auto a = mlp_train(mlp_init({2, 6, 3}, 1), x, y, tx, ty, norm, cfg);
  const auto b = mlp_train(mlp_init({2, 6, 3}, 1), x, y, tx, ty, norm, cfg);
  CHECK(a.best.parameters() == b.best.parameters());
  REQUIRE(a.records.size() == b.records.size());
  double lowest = 1e300;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].test_mse == b.records[i].test_mse);
    lowest = std::min(lowest, a.records[i].test_mse);
  }
  CHECK(a.best_test_mse == lowest);
  CHECK(mse(a.best, tx, ty, norm) == doctest::Approx(lowest).epsilon(1e-12));
  CHECK(a.records.front().iteration == 0);
  CHECK(a.records.back().iteration == 400);
}

TEST_CASE("divergence is reported with the iteration") {
  RowMatrix x(2, 1), y(2, 1);
  x(1, 0) = 1.0;
  y(1, 0) = 1.0;
  MlpNetwork net({1, 1});
  net.weight(0)[0] = std::nan("");
  TrainConfig cfg;
  CHECK_THROWS_AS(mlp_train(net, x, y, x, y, unit_box(1), cfg), TrainingError);
  cfg.lr_up = 0.9;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("argmax and classification") {
  CHECK(argmax(std::vector<double>{0.9, 0.1, 0.2}) == 0);
  CHECK(argmax(std::vector<double>{0.4, 0.4, 0.1}) == 0);
  CHECK(argmax(std::vector<double>{0.1, 0.4, 0.4}) == 1);
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> v{rng.uniform(), rng.uniform(), rng.uniform()};
    std::vector<double> t;
    for (double e : v) t.push_back(std::exp(3.0 * e) - 7.0);
    CHECK(argmax(v) == argmax(t));
  }
  auto net = mlp_init({2, 3}, 1);
  const auto norm = unit_box(2);
  const std::vector<double> x{0.3, -0.1};
  CHECK(classify(net, x, norm) == argmax(mlp_forward(net, norm.apply(x))));
}

TEST_CASE("normalizer") {
  Rng rng(44);
  RowMatrix x;
  for (int i = 0; i < 1000; ++i) x.append(std::vector<double>{rng.uniform(0, 1.5), rng.uniform(0, 6.2), rng.uniform(-3, 3)});
  const auto norm = Normalizer::fit(x);
  for (std::size_t j = 0; j < 3; ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 0; i < x.rows; ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    CHECK(norm.min()[j] == lo);
    CHECK(norm.max()[j] == hi);
  }
  const auto lo = norm.apply(norm.min());
  const auto hi = norm.apply(norm.max());
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(lo[j] == -1.0);
    CHECK(hi[j] == 1.0);
    const std::vector<double> mid{(norm.min()[0] + norm.max()[0]) / 2, (norm.min()[1] + norm.max()[1]) / 2,
                                  (norm.min()[2] + norm.max()[2]) / 2};
    CHECK(std::abs(norm.apply(mid)[j]) < 1e-15);
  }
  // linear extrapolation, no clamping
  const std::vector<double> outside{norm.max()[0] + (norm.max()[0] - norm.min()[0]), norm.min()[1], norm.min()[2]};
  CHECK(norm.apply(outside)[0] == doctest::Approx(3.0));

  WarningCapture cap;
  RowMatrix c;
  c.append(std::vector<double>{1.0, 2.0});
  c.append(std::vector<double>{1.0, 3.0});
  const auto cn = Normalizer::fit(c);
  CHECK(cap.seen.size() == 1);
  CHECK(cn.apply(std::vector<double>{5.0, 2.5})[0] == 0.0);
  CHECK_THROWS_AS(Normalizer::fit(RowMatrix(1, 2)), ValidationError);
}

TEST_CASE("model document round-trips") {
  const auto net = mlp_init({4, 7, 3}, 21);
  const Normalizer norm({0.0, 0.0, 0.0, 0.0}, {1.5, 1.5, 6.2, 6.2});
  const auto [back, bnorm] = mlp_from_json(mlp_to_json(net, norm));
  CHECK(back.layer_sizes() == net.layer_sizes());
  CHECK(back.parameters() == net.parameters());
  CHECK(std::vector<double>(bnorm.max().begin(), bnorm.max().end()) == std::vector<double>{1.5, 1.5, 6.2, 6.2});
  CHECK_THROWS_AS(mlp_from_json("{\"format\":\"qlc-model\"}"), ParseError);
  CHECK_THROWS_AS(mlp_from_json("not json"), ParseError);
}

}  // TEST_SUITE
