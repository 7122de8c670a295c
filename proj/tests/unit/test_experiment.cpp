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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "qlc/error.hpp"
#include "qlc/experiment.hpp"
#include "qlc/grnn.hpp"
#include "qlc/textio.hpp"

using namespace qlc;

TEST_SUITE("experiment") {

TEST_CASE("defaults describe the benchmark") {
  ExperimentConfig c;
  c.resolve();
  CHECK(c.omega2 == 2.0);
  CHECK(c.omega3 == 5.0);
  CHECK(c.coupling == 0.5);
  CHECK(c.strength == 1.0);
  CHECK(c.horizon == 20.0);
  CHECK(c.reg_horizon == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  const auto s = c.classification_system();
  CHECK(s.controls().size() == 2);
  CHECK(s.goal() == 2);
  CHECK(c.regression_system().controls().size() == 1);
  CHECK(c.regression_system().horizon() == c.reg_horizon);
}

TEST_CASE("scale-dependent defaults") {
  ExperimentConfig desk;
  desk.resolve();
  CHECK(desk.n_apply == 10000);
  CHECK(desk.region_resolution == 100);
  CHECK(desk.train.max_iters == 20000);
  ExperimentConfig paper;
  paper.set("paper_scale", "true");
  paper.set("n_apply", "777");
  paper.resolve();
  CHECK(paper.n_apply == 777);
  CHECK(paper.region_resolution == 500);
  CHECK(paper.reg_apply == 100000);
  CHECK(paper.table1_sizes.back() == 40000);
  CHECK(paper.table2_sizes.back() == 100000);
  CHECK(paper.train.max_iters == 100000);
}

TEST_CASE("parsing") {
  const auto c = ExperimentConfig::parse("# comment\n\n  seed = 42  # trailing\nhidden = 10, 20\nfid_threshold=0.95\n");
  CHECK(c.seed == 42);
  CHECK(c.hidden == std::vector<std::size_t>{10, 20});
  CHECK(c.fid_threshold == 0.95);
  try {
    ExperimentConfig::parse("seed = 1\nbogus = 2\n");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(ExperimentConfig::parse("seed 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("strength = fast\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("threads = -1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/qlc.cfg"), ConfigError);
}

TEST_CASE("validation") {
  auto bad = [](const std::string& key, const std::string& value) {
    ExperimentConfig c;
    c.set(key, value);
    CHECK_THROWS_AS(c.resolve(), ConfigError);
  };
  bad("strength", "0");
  bad("omega3", "-5");
  bad("goal", "4");
  bad("candidates", "1,3");
  bad("candidates", "1,1");
  bad("class_weights", "1,1,1");
  bad("lr_up", "0.9");
  bad("reg_upper", "10");
  bad("hist_bins", "0");
  bad("table1_sizes", "10,0");
}

TEST_CASE("dump round-trips and checksum ignores threads and out") {
  ExperimentConfig c;
  c.set("seed", "5");
  c.set("class_weights", "1,0.5,0");
  c.resolve();
  auto back = ExperimentConfig::parse(c.dump());
  back.resolve();
  CHECK(back.dump() == c.dump());
  CHECK(back.checksum() == c.checksum());
  back.set("threads", "8");
  back.set("out", "elsewhere");
  CHECK(back.checksum() == c.checksum());
  back.set("tie_eps", "1e-5");
  CHECK(back.checksum() != c.checksum());
  CHECK(c.get("class_weights") == "1,0.5,0");
}

TEST_CASE("region grid") {
  const auto g = region_grid(5);
  REQUIRE(g.size() == 25);
  CHECK(g.front().theta()[0] == 0.0);
  CHECK(g.back().theta()[0] == doctest::Approx(std::numbers::pi / 2));
  CHECK(g.back().theta()[1] == doctest::Approx(std::numbers::pi / 2));
  CHECK(g[1].theta()[0] == 0.0);
  CHECK(g[1].theta()[1] == doctest::Approx(std::numbers::pi / 8));
  for (const auto& s : g) CHECK(s.phi()[0] == 0.0);
  CHECK_THROWS_AS(region_grid(1), ValidationError);
}

TEST_CASE("state-independent baselines") {
  ExperimentConfig c;
  c.resolve();
  const auto system = c.regression_system();
  const auto states = random_param_list(3, 6, 3, "state");
  const std::vector<double> w{2.0, 5.0};
  const auto f = fixed_weight_fidelities(system, states, w);
  for (std::size_t i = 0; i < states.size(); ++i)
    CHECK(f[i] == doctest::Approx(final_fidelity(system, state_from_params(states[i], system.basis()),
                                                 LyapunovWeights({2.0, 5.0, 0.0}, 2), Scheme{0}, system.default_dt()))
                      .epsilon(1e-12));
  const BoxBounds bounds({0.0, 0.0}, {10.0, 20.0});
  NelderMeadOptions o;
  o.max_evals = 60;
  const auto p = optimize_pind(system, states, bounds, 2, 11, o);
  CHECK(bounds.contains(p.free));
  CHECK(p.epsilon == doctest::Approx(avg_log_infidelity(fixed_weight_fidelities(system, states, p.free)).value).epsilon(1e-12));
  CHECK(p.epsilon <= avg_log_infidelity(fixed_weight_fidelities(system, states, w)).value + 1.0);
}

TEST_CASE("commands write parseable, labelled CSV") {
  const auto dir = std::filesystem::temp_directory_path() / "qlc-unit-experiment";
  std::filesystem::remove_all(dir);
  ExperimentConfig c;
  c.out = dir.string();
  c.set("max_iters", "30");
  c.set("eval_every", "10");
  c.set("n_test", "30");
  c.resolve();
  const auto gen = run_command(c, "gen-samples", {{"kind", "classification"}, {"count", "60"}});
  REQUIRE(gen.files.size() == 1);
  double total = 0.0;
  for (int k = 1; k <= 3; ++k) total += gen.metrics.at("fraction_" + std::to_string(k));
  CHECK(total == doctest::Approx(1.0));
  const auto tr = run_command(c, "train-mlp", {{"train", gen.files[0]}, {"count", "60"}});
  std::istringstream in(read_file((dir / "mlp-history.csv").string()));
  const auto t = read_csv(in);
  CHECK(t.columns.front() == "iteration");
  CHECK(t.rows.size() == 4);
  CHECK(t.meta.at("command") == "train-mlp");
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(c.checksum()));
  CHECK(t.meta.at("config") == hex);
  CHECK(tr.metrics.count("test_rate") == 1);
  CHECK_THROWS_AS(run_command(c, "region-map", {}), ConfigError);
  CHECK_THROWS_AS(run_command(c, "gen-samples", {{"kind", "other"}}), ConfigError);
  CHECK_THROWS_AS(run_command(c, "gen-samples", {{"count", "0"}}), ConfigError);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
