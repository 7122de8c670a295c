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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qlc/benchmark.hpp"
#include "qlc/error.hpp"
#include "qlc/grnn.hpp"
#include "qlc/rng.hpp"

using namespace qlc;

namespace {

struct Toy {
  RowMatrix x, y;
};

Toy toy(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Toy t;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(0, 1.5), b = rng.uniform(0, 6.2);
    t.x.append(std::vector<double>{a, b});
    t.y.append(std::vector<double>{std::sin(a) + b, a * b});
  }
  return t;
}

}  // namespace

TEST_SUITE("grnn") {

TEST_CASE("spacing") {
  CHECK(grnn_spacing(50000, 4) == doctest::Approx(0.13375).epsilon(1e-4));
  CHECK(grnn_spacing(1, 4) == 2.0);
  CHECK(grnn_spacing(16, 4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(toy(16, 1).x.cols == 2);
  CHECK(GrnnModel::build(toy(16, 1).x, toy(16, 1).y).spacing() == doctest::Approx(0.5));
}

TEST_CASE("sigma grid") {
  const auto g = default_sigma_grid(0.2);
  CHECK(g.size() == 41);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(g.front() == doctest::Approx(0.0002));
  CHECK(g.back() == doctest::Approx(0.2));
  CHECK(std::find(g.begin(), g.end(), 0.1) != g.end());
}

TEST_CASE("single stored sample") {
  RowMatrix x(1, 2), y(1, 2);
  x(0, 0) = 0.7;
  x(0, 1) = 2.0;
  y(0, 0) = 3.5;
  y(0, 1) = 11.0;
  const auto m = GrnnModel::build(x, y);
  for (double s : {1e-3, 1.0, 100.0}) {
    const auto p = m.predict(std::vector<double>{0.1, 5.0}, s);
    CHECK(p[0] == 3.5);
    CHECK(p[1] == 11.0);
  }
}

TEST_CASE("recall and mean limits") {
  const auto t = toy(200, 3);
  const auto m = GrnnModel::build(t.x, t.y);
  const double d = m.spacing();
  const auto recall = m.predict(t.x, 1e-4 * d);
  double err = 0.0;
  for (std::size_t i = 0; i < t.y.data.size(); ++i) err = std::max(err, std::abs(recall.data[i] - t.y.data[i]));
  CHECK(err < 1e-9);

  // Away from the flat limit the gap is at most (1 - min weight) times the
  // output spread.
  const auto q = m.normalizer().apply(std::vector<double>{0.3, 4.0});
  double d2max = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    d2max = std::max(d2max, std::pow(q[0] - m.stored_inputs()(i, 0), 2) + std::pow(q[1] - m.stored_inputs()(i, 1), 2));
  const double sigma = 1e3 * d;
  const auto far = m.predict(std::vector<double>{0.3, 4.0}, sigma);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0, lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < t.y.rows; ++i) {
      mean += t.y(i, j) / t.y.rows;
      lo = std::min(lo, t.y(i, j));
      hi = std::max(hi, t.y(i, j));
    }
    CHECK(std::abs(far[j] - mean) <= -std::expm1(-d2max / (2 * sigma * sigma)) * (hi - lo));
  }
}

TEST_CASE("flat limit on a four-input set") {
  // N = 16, n_I = 4 gives D = 1; outputs in [0, 1].
  Rng rng(31);
  RowMatrix x, y;
  for (int i = 0; i < 16; ++i) {
    x.append(std::vector<double>{rng.uniform(0, 1.5), rng.uniform(0, 1.5), rng.uniform(0, 6.2), rng.uniform(0, 6.2)});
    y.append(std::vector<double>{rng.uniform(), rng.uniform()});
  }
  const auto m = GrnnModel::build(x, y);
  REQUIRE(m.spacing() == doctest::Approx(1.0));
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> q{rng.uniform(0, 1.5), rng.uniform(0, 1.5), rng.uniform(0, 6.2), rng.uniform(0, 6.2)};
    const auto p = m.predict(q, 1e3 * m.spacing());
    for (std::size_t j = 0; j < 2; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 16; ++i) mean += y(i, j) / 16;
      CHECK(std::abs(p[j] - mean) < 1e-6);
    }
  }
}

TEST_CASE("predictions are convex combinations") {
  const auto t = toy(100, 4);
  const auto m = GrnnModel::build(t.x, t.y);
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (std::size_t i = 0; i < t.y.rows; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      lo[j] = std::min(lo[j], t.y(i, j));
      hi[j] = std::max(hi[j], t.y(i, j));
    }
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const auto p = m.predict(std::vector<double>{rng.uniform(-1, 3), rng.uniform(-2, 8)}, rng.uniform(0.01, 2.0));
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(p[j] >= lo[j]);
      CHECK(p[j] <= hi[j]);
    }
  }
}

TEST_CASE("sample order does not matter") {
  const auto t = toy(80, 6);
  Toy r;
  std::vector<std::size_t> idx(80);
  for (std::size_t i = 0; i < 80; ++i) idx[i] = (i * 37) % 80;
  for (auto i : idx) {
    r.x.append(t.x.row(i));
    r.y.append(t.y.row(i));
  }
  const auto a = GrnnModel::build(t.x, t.y);
  const auto b = GrnnModel::build(r.x, r.y);
  const auto q = toy(30, 7);
  for (double s : {0.01, 0.1, 0.5}) CHECK(a.predict(q.x, s).data == b.predict(q.x, s).data);
}

TEST_CASE("sweep equals individual predictions") {
  const auto t = toy(50, 8);
  const auto m = GrnnModel::build(t.x, t.y);
  const auto q = toy(10, 9);
  const std::vector<double> sigmas{0.02, 0.2, 1.0};
  const auto sweep = m.predict_sweep(q.x, sigmas);
  for (std::size_t i = 0; i < sigmas.size(); ++i) CHECK(sweep[i].data == m.predict(q.x, sigmas[i]).data);
}

TEST_CASE("underflow falls back to the nearest sample") {
  const auto t = toy(20, 10);
  const auto m = GrnnModel::build(t.x, t.y);
  std::vector<std::string> seen;
  set_warning_sink([&](const std::string& w) { seen.push_back(w); });
  std::size_t fallbacks = 0;
  const auto q = toy(5, 11);
  const auto p = m.predict(q.x, 1e-6, &fallbacks);
  set_warning_sink(nullptr);
  CHECK(fallbacks == 5);
  CHECK(seen.size() == 1);
  // nearest by normalized distance
  for (std::size_t i = 0; i < q.x.rows; ++i) {
    const auto z = m.normalizer().apply(q.x.row(i));
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t s = 0; s < m.size(); ++s) {
      double d = 0;
      for (std::size_t j = 0; j < 2; ++j) d += std::pow(z[j] - m.stored_inputs()(s, j), 2);
      if (d < bd) bd = d, best = s;
    }
    CHECK(p(i, 0) == m.stored_outputs()(best, 0));
  }
}

TEST_CASE("log infidelity") {
  CHECK(avg_log_infidelity(std::vector<double>{0.9}).value == doctest::Approx(-1.0));
  CHECK(avg_log_infidelity(std::vector<double>{0.999}).value == doctest::Approx(-3.0));
  CHECK(avg_log_infidelity(std::vector<double>{0.9, 0.999}).value == doctest::Approx(-2.0));
  const auto c = avg_log_infidelity(std::vector<double>{1.0, 0.9});
  CHECK(c.clamped == 1);
  CHECK(c.value == doctest::Approx((-12.0 - 1.0) / 2).epsilon(1e-6));
  CHECK(fraction_above(std::vector<double>{0.9991, 0.999, 0.5, 1.0}) == 0.5);
}

TEST_CASE("model document round-trips") {
  const auto t = toy(12, 12);
  auto m = GrnnModel::build(t.x, t.y);
  CHECK_FALSE(GrnnModel::from_json(m.to_json()).sigma().has_value());
  m.set_sigma(0.37);
  const auto back = GrnnModel::from_json(m.to_json());
  CHECK(back.sigma().value() == 0.37);
  CHECK(back.stored_inputs().data == m.stored_inputs().data);
  CHECK(back.stored_outputs().data == m.stored_outputs().data);
  CHECK(back.spacing() == m.spacing());
  const auto q = toy(4, 13);
  CHECK(back.predict(q.x, 0.37).data == m.predict(q.x, 0.37).data);
  CHECK_THROWS_AS(GrnnModel::from_json("{\"type\":\"mlp\"}"), ParseError);
  CHECK_THROWS_AS(m.set_sigma(0.0), ValidationError);
}

TEST_CASE("control fidelities and sigma tuning") {
  const auto system = three_level_system_h1(ThreeLevelParams{}, 1.0, 2 * std::numbers::pi);
  // Model that always predicts the same weights: fidelities must match a
  // direct run with those weights.
  RowMatrix x, y;
  x.append(std::vector<double>{0.5, 0.5, 1.0, 2.0});
  y.append(std::vector<double>{1.0, 4.0});
  const auto m = GrnnModel::build(x, y);
  const std::vector<InitialStateParams> states{InitialStateParams({0.4, 1.1}, {0.3, 5.0}),
                                               InitialStateParams({1.2, 0.7}, {2.0, 1.0})};
  const auto f = grnn_control_fidelities(m, system, states, 0.5);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double direct = final_fidelity(system, state_from_params(states[i], system.basis()),
                                         LyapunovWeights({1.0, 4.0, 0.0}, 2), Scheme{0}, system.default_dt());
    CHECK(f[i] == doctest::Approx(direct).epsilon(1e-12));
  }
  const std::vector<double> grid{0.1, 0.5};
  const auto tuning = grnn_tune_sigma(m, states, system, grid);
  CHECK(tuning.curve.size() == 2);
  CHECK(tuning.best_sigma == 0.1);  // equal epsilon: first wins
}

}  // TEST_SUITE
