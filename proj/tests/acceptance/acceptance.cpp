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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
//   qlc_acceptance [--work DIR] [--threads N] [--only 1,3,5]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "qlc/benchmark.hpp"
#include "qlc/dataset.hpp"
#include "qlc/error.hpp"
#include "qlc/experiment.hpp"
#include "qlc/grnn.hpp"
#include "qlc/mlp.hpp"
#include "qlc/textio.hpp"

using namespace qlc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

std::string band(const std::string& name, double v, double target, double tol) {
  return name + "=" + num(v) + " (" + num(target, 3) + "+-" + num(tol, 3) + ")";
}

void detail(const std::string& line) {
  std::printf("    %s\n", line.c_str());
  std::fflush(stdout);
}

class Acceptance {
 public:
  Acceptance(fs::path work, unsigned threads) : work_(std::move(work)) {
    cfg_.threads = threads;
    cfg_.out = (work_ / "run").string();
    cfg_.resolve();
  }

  CommandReport run(const std::string& command, const CommandArgs& args = {}) {
    return run_command(cfg_, command, args, [](const std::string& l) { detail(l); });
  }

  // ---- shared data, produced on first use ----
  const std::string& classification_file() {
    if (cls_file_.empty()) {
      auto r = run("gen-samples", {{"kind", "classification"}, {"count", "10000"}});
      cls_file_ = r.files.front();
      cls_report_ = r;
    }
    return cls_file_;
  }

  const std::string& regression_file() {
    if (reg_file_.empty()) reg_file_ = run("gen-samples", {{"kind", "regression"}, {"count", "5000"}}).files.front();
    return reg_file_;
  }

  const CommandReport& table1() {
    if (!table1_) table1_ = run("table1", {{"sizes", "1000,10000"}, {"train", classification_file()}});
    return *table1_;
  }

  const CommandReport& table2() {
    if (!table2_) table2_ = run("table2", {{"sizes", "5000"}, {"train", regression_file()}});
    return *table2_;
  }

  // ---- criteria ----
  Outcome dynamics_invariants() {
    const auto system = cfg_.classification_system();
    const auto states = random_param_list(3, 200, 101, "state");
    const LyapunovWeights w({1.0, 1.0, 0.0}, 2);
    const std::vector<Scheme> schemes{{0}, {1}, {0, 1}};
    double drift = 0.0, rise = 0.0, worst_ratio = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto traj = evolve(system, state_from_params(states[i], system.basis()), w, schemes[i % 3],
                               system.default_dt());
      drift = std::max(drift, traj.max_step_drift);
      for (std::size_t k = 1; k < traj.lyapunov.size(); ++k) rise = std::max(rise, traj.lyapunov[k] - traj.lyapunov[k - 1]);
      double peak = 0.0;
      for (const auto& f : traj.fields) {
        double s = 0.0;
        for (double x : f) s += x * x;
        peak = std::max(peak, s);
      }
      if (peak > 0) worst_ratio = std::max(worst_ratio, lyapunov_rate_check(traj, system.strength()) / peak);
    }
    double refine = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      const auto psi = state_from_params(states[i], system.basis());
      const double a = final_fidelity(system, psi, w, {0}, system.default_dt());
      const double b = final_fidelity(system, psi, w, {0}, system.default_dt() / 10);
      refine = std::max(refine, std::abs(a - b));
    }
    const bool ok = drift < 1e-9 && rise <= 1e-8 && worst_ratio < 1e-4 && refine < 1e-6;
    return {ok, "norm drift " + sci(drift) + " (<1e-9), V rise " + sci(rise) + " (<=1e-8), rate residual/peak " +
                    sci(worst_ratio) + " (<1e-4), dt vs dt/10 " + sci(refine) + " (<1e-6)"};
  }

  Outcome gauge_and_strength() {
    const auto system = cfg_.classification_system();
    const auto states = random_param_list(3, 50, 202, "state");
    const LyapunovWeights w({2.0, 0.7, 0.0}, 2);
    const auto p = build_p(w, system.basis());
    const HermitianOperator shifted(p.matrix() + Complex(3.7) * ComplexMatrix::identity(3));
    double gauge = 0.0;
    for (const auto& s : states) {
      const auto traj = evolve(system, state_from_params(s, system.basis()), w, {0, 1}, system.default_dt(),
                               EvolveOptions{400, false});
      for (const auto& psi : traj.states)
        for (std::size_t k = 0; k < 2; ++k)
          gauge = std::max(gauge, std::abs(control_field(psi, system.controls()[k], p, 1.0) -
                                           control_field(psi, system.controls()[k], shifted, 1.0)));
    }
    const double big_k = 2.5;
    double absorb = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      const auto psi = state_from_params(states[i], system.basis());
      const auto a = evolve(system.with_strength(big_k), psi, w, {0, 1}, system.default_dt(), EvolveOptions{40, false});
      const auto b = evolve(system, psi, w.scaled(big_k), {0, 1}, system.default_dt(), EvolveOptions{40, false});
      for (std::size_t t = 0; t < a.states.size(); ++t)
        for (std::size_t l = 0; l < 3; ++l) absorb = std::max(absorb, std::abs(a.states[t][l] - b.states[t][l]));
    }
    return {gauge < 1e-12 && absorb < 1e-9,
            "P+cI field change " + sci(gauge) + " (<1e-12), (K,p) vs (1,Kp) state difference " + sci(absorb) + " (<1e-9)"};
  }

  Outcome label_rates() {
    classification_file();
    const double h1 = cls_report_.metrics.at("fraction_1"), h2 = cls_report_.metrics.at("fraction_2"),
                 other = cls_report_.metrics.at("fraction_3");
    return {within(h1, 0.59, 0.04) && within(h2, 0.37, 0.04) && within(other, 0.04, 0.03),
            band("H1", h1, 0.59, 0.04) + ", " + band("H2", h2, 0.37, 0.04) + ", " + band("others", other, 0.04, 0.03)};
  }

  Outcome gradient_check() {
    auto net = mlp_init({4, 5, 3}, 404);
    Rng rng(405);
    for (std::size_t l = 0; l < net.layers(); ++l)
      for (double& b : net.bias(l)) b = rng.uniform(-0.5, 0.5);
    RowMatrix x(20, 4), y(20, 3);
    for (double& v : x.data) v = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < 20; ++i) y(i, rng.below(3)) = 1.0;
    const Normalizer id(std::vector<double>(4, -1.0), std::vector<double>(4, 1.0));
    const auto g = mse_gradient(net, x, y);
    const auto p = net.parameters();
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto q = p;
      q[i] += 1e-5;
      net.set_parameters(q);
      const double up = mse(net, x, y, id);
      q[i] = p[i] - 1e-5;
      net.set_parameters(q);
      const double fd = (up - mse(net, x, y, id)) / 2e-5;
      worst = std::max(worst, std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-12}));
    }
    return {worst < 1e-5, "max relative error " + sci(worst) + " over " + std::to_string(p.size()) + " parameters (<1e-5)"};
  }

  Outcome table1_rates() {
    const auto& m = table1().metrics;
    const double a = m.at("r_apply_1000"), b = m.at("r_apply_10000");
    return {a >= 0.95 && b >= 0.975, "R_A(N=1e3)=" + num(a) + " (>=0.95), R_A(N=1e4)=" + num(b) + " (>=0.975)"};
  }

  Outcome region_map() {
    table1();
    const auto r = run("region-map", {{"model", cfg_.out + "/mlp-n10000.json"}, {"resolution", "100"}});
    const double a = r.metrics.at("agreement");
    return {a >= 0.95, "agreement " + num(a) + " on 100x100 (>=0.95)"};
  }

  Outcome grnn_limits() {
    Rng rng(707);
    // single stored sample
    RowMatrix x1(1, 4), y1(1, 2);
    for (double& v : x1.data) v = rng.uniform(0, 1.5);
    y1(0, 0) = 3.25;
    y1(0, 1) = 17.5;
    const auto m1 = GrnnModel::build(x1, y1);
    bool single = true;
    for (int k = 0; k < 20; ++k) {
      const std::vector<double> q{rng.uniform(0, 1.5), rng.uniform(0, 1.5), rng.uniform(0, 6.3), rng.uniform(0, 6.3)};
      const auto p = m1.predict(q, rng.uniform(1e-3, 10.0));
      single = single && p[0] == 3.25 && p[1] == 17.5;
    }
    // flat limit: N = 16, n_I = 4 (D = 1), outputs in [0, 1]
    RowMatrix x16, y16;
    for (int i = 0; i < 16; ++i) {
      x16.append(random_params(3, rng).as_input_vector());
      y16.append(std::vector<double>{rng.uniform(), rng.uniform()});
    }
    const auto m16 = GrnnModel::build(x16, y16);
    double flat = 0.0;
    for (int k = 0; k < 50; ++k) {
      const auto p = m16.predict(random_params(3, rng).as_input_vector(), 1e3 * m16.spacing());
      for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 16; ++i) mean += y16(i, j) / 16.0;
        flat = std::max(flat, std::abs(p[j] - mean));
      }
    }
    // exact recall on 2000 distinct samples with label-like outputs
    RowMatrix xs, ys;
    for (int i = 0; i < 2000; ++i) {
      xs.append(random_params(3, rng).as_input_vector());
      ys.append(std::vector<double>{rng.uniform(0, 10), rng.uniform(0, 20)});
    }
    const auto m = GrnnModel::build(xs, ys);
    const auto back = m.predict(xs, 1e-4 * m.spacing());
    double recall = 0.0;
    for (std::size_t i = 0; i < ys.data.size(); ++i) recall = std::max(recall, std::abs(back.data[i] - ys.data[i]));
    return {single && flat < 1e-6 && recall < 1e-9, std::string("single-sample recall ") + (single ? "exact" : "WRONG") +
                                                       ", flat-limit gap " + sci(flat) + " (<1e-6), recall error " +
                                                       sci(recall) + " (<1e-9)"};
  }

  Outcome regression_labels() {
    std::ifstream in(regression_file());
    const auto set = load(in).prefix(2000);
    std::vector<double> fid;
    for (const auto& s : set.samples) fid.push_back(1.0 - s.meta[0]);
    const double eps = avg_log_infidelity(fid).value, r = fraction_above(fid);
    return {within(eps, -4.0, 0.4) && within(r, 0.77, 0.06),
            band("epsilon", eps, -4.0, 0.4) + ", " + band("R", r, 0.77, 0.06) + " on 2000 labels"};
  }

  Outcome table2_row() {
    const auto& m = table2().metrics;
    const double eps = m.at("epsilon_5000"), r = m.at("r_high_5000");
    return {eps <= -3.1 && r >= 0.60, "epsilon=" + num(eps) + " (<=-3.1), R=" + num(r) + " (>=0.60) at sigma=0.5D"};
  }

  Outcome sigma_sweep() {
    const auto r = run("tune-grnn", {{"train", regression_file()}, {"count", "5000"}});
    const double s = r.metrics.at("sigma_over_d");
    return {s >= 0.3 && s <= 0.7, "minimum at sigma/D=" + num(s, 3) + " (in [0.3, 0.7]), epsilon " +
                                      num(r.metrics.at("epsilon"))};
  }

  Outcome baselines() {
    const auto r = run("baseline-pind");
    const double ep = r.metrics.at("epsilon"), rp = r.metrics.at("r_high");
    const double ef = r.metrics.at("epsilon_fixed"), rf = r.metrics.at("r_fixed");
    const double eg = table2().metrics.at("epsilon_5000"), rg = table2().metrics.at("r_high_5000");
    const bool ok = within(ep, -2.8, 0.4) && within(rp, 0.44, 0.07) && within(ef, -1.26, 0.3) && within(rf, 0.048, 0.03) &&
                    ep > eg && ef > eg && rp < rg && rf < rg;
    return {ok, "P_ind " + band("epsilon", ep, -2.8, 0.4) + " " + band("R", rp, 0.44, 0.07) + "; fixed " +
                    band("epsilon", ef, -1.26, 0.3) + " " + band("R", rf, 0.048, 0.03) + "; GRNN epsilon " + num(eg) +
                    " R " + num(rg)};
  }

  Outcome determinism() {
    const fs::path cli = QLC_CLI_PATH;
    const fs::path base = work_ / "determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string config = (base / "small.cfg").string();
    write_file(config,
               "# small determinism run\nmax_iters = 300\nn_test = 200\nn_validation = 100\nrestarts = 3\n"
               "reg_apply = 300\npind_states = 40\npind_restarts = 2\nseed = 77\n");
    const std::vector<std::string> steps = {
        "gen-samples --kind classification --count 600",
        "gen-samples --kind regression --count 24",
        "train-mlp --count 600 --train {out}/samples-classification-train-600.txt",
        "table1 --sizes 100,600 --train {out}/samples-classification-train-600.txt",
        "region-map --model {out}/mlp.json --resolution 12",
        "tune-grnn --count 24 --train {out}/samples-regression-train-24.txt",
        "table2 --sizes 12,24 --train {out}/samples-regression-train-24.txt",
        "baseline-pind",
        "infidelity-dist --model {out}/grnn.json --train {out}/samples-regression-train-24.txt --pind 1.5,3",
        "trajectory --kind regression --state 0.4,1.1,0.3,5.0",
    };
    auto run_all = [&](const std::string& out, unsigned threads) {
      for (auto step : steps) {
        for (auto pos = step.find("{out}"); pos != std::string::npos; pos = step.find("{out}"))
          step.replace(pos, 5, out);
        const std::string cmd = "\"" + cli.string() + "\" --config " + config + " --out " + out + " --threads " +
                                std::to_string(threads) + " " + step + " > " + out + ".log 2>&1";
        fs::create_directories(out);
        if (std::system(cmd.c_str()) != 0) return "command failed: " + step;
      }
      return std::string();
    };
    const std::string a = (base / "t1").string(), b = (base / "t3").string();
    for (const auto& [dir, t] : {std::pair{a, 1u}, std::pair{b, 3u}})
      if (auto err = run_all(dir, t); !err.empty()) return {false, err};
    std::set<std::string> names;
    for (const auto& d : {a, b})
      for (const auto& e : fs::directory_iterator(d)) names.insert(e.path().filename().string());
    std::size_t same = 0;
    std::string differing;
    for (const auto& n : names) {
      const auto pa = fs::path(a) / n, pb = fs::path(b) / n;
      if (fs::exists(pa) && fs::exists(pb) && read_file(pa.string()) == read_file(pb.string())) ++same;
      else differing += " " + n;
    }
    return {differing.empty() && same >= 15,
            std::to_string(same) + "/" + std::to_string(names.size()) + " output files byte-identical across 1 and 3 threads" +
                (differing.empty() ? "" : "; differ:" + differing)};
  }

 private:
  fs::path work_;
  ExperimentConfig cfg_;
  std::string cls_file_, reg_file_;
  CommandReport cls_report_;
  std::optional<CommandReport> table1_, table2_;
};

}  // namespace

int main(int argc, char** argv) {
  fs::path work = "acceptance-work";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) work = argv[++i];
    else if (a == "--threads" && i + 1 < argc) threads = static_cast<unsigned>(std::atoi(argv[++i]));
    else if (a == "--only" && i + 1 < argc)
      for (auto part : split(argv[++i], ',')) only.insert(static_cast<int>(parse_int(part)));
    else {
      std::fprintf(stderr, "usage: qlc_acceptance [--work DIR] [--threads N] [--only 1,2,...]\n");
      return 2;
    }
  }
  fs::create_directories(work);
  Acceptance acc(work, threads);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dynamics invariants", [&] { return acc.dynamics_invariants(); }},
      {"gauge and K absorption", [&] { return acc.gauge_and_strength(); }},
      {"label base rates", [&] { return acc.label_rates(); }},
      {"MLP gradient check", [&] { return acc.gradient_check(); }},
      {"classifier success rates", [&] { return acc.table1_rates(); }},
      {"region map agreement", [&] { return acc.region_map(); }},
      {"GRNN analytic limits", [&] { return acc.grnn_limits(); }},
      {"regression label quality", [&] { return acc.regression_labels(); }},
      {"GRNN application", [&] { return acc.table2_row(); }},
      {"sigma sweep minimum", [&] { return acc.sigma_sweep(); }},
      {"baselines", [&] { return acc.baselines(); }},
      {"determinism", [&] { return acc.determinism(); }},
  };

  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++ran;
    failed += !o.pass;
    std::printf("%s %2d %s: %s [%.0fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
