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

// Experiment layer behind the command-line verbs: configuration, the
// three-level benchmark in both designs, and the table/figure commands.
//
// Config files are flat `key = value` text; '#' starts a comment. Keys are
// listed by config_keys() and documented in README.md. Keys left unset whose
// default depends on scale take the desk-scale value unless paper_scale is
// true.

#ifndef QLC_EXPERIMENT_HPP
#define QLC_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qlc/dataset.hpp"
#include "qlc/mlp.hpp"

namespace qlc {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = "out";
  bool paper_scale = false;

  // Benchmark system, omega_1 = 1 units.
  double omega2 = 2.0;
  double omega3 = 5.0;
  double coupling = 0.5;
  double strength = 1.0;
  double horizon = 20.0;
  double reg_horizon = 6.283185307179586;
  std::size_t goal = 3;  // 1-based eigenstate index
  std::vector<std::size_t> candidates{1, 2};
  std::size_t reg_control = 1;

  // Classification labels and network.
  std::vector<double> class_weights{1.0, 1.0, 0.0};
  double fid_threshold = 0.99;
  double tie_eps = 1e-6;
  std::vector<std::size_t> hidden{30, 30};
  TrainConfig train{};
  std::vector<std::size_t> table1_sizes;
  std::size_t n_test = 5000;
  std::size_t n_apply = 0;
  std::size_t region_resolution = 0;

  // Regression labels and GRNN.
  std::vector<double> reg_upper{10.0, 20.0};
  int restarts = 8;
  NelderMeadOptions search{};
  std::vector<std::size_t> table2_sizes;
  std::size_t reg_apply = 0;
  std::size_t n_validation = 2000;
  double sigma_factor = 0.5;
  std::size_t pind_states = 0;
  int pind_restarts = 0;
  std::vector<double> fixed_weights{10.0, 10.0};
  double hist_min = -12.0;
  double hist_max = 0.0;
  std::size_t hist_bins = 48;

  /// Keys given explicitly (file or set()); the rest follow the scale.
  std::set<std::string> explicit_keys;

  /// Parses `key = value` lines; throws ConfigError naming the line.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  /// Fills scale-dependent values that were not set explicitly and checks
  /// every field. Throws ConfigError.
  void resolve();
  /// Resolved `key = value` lines in canonical order.
  std::string dump() const;
  /// FNV-1a of dump() without threads and out, which never change results.
  std::uint64_t checksum() const;

  ControlledSystem classification_system() const;
  ControlledSystem regression_system() const;
  GenerateOptions generate_options() const;
  /// Seed of a named stream derived from the master seed.
  std::uint64_t stream_seed(const std::string& name) const;
};

std::vector<std::string> config_keys();

/// Named command options, e.g. {"kind", "classification"}.
using CommandArgs = std::map<std::string, std::string>;

struct CommandReport {
  std::vector<std::string> files;
  std::map<std::string, double> metrics;
};

using LogSink = std::function<void(const std::string&)>;

std::vector<std::string> command_names();

/// Runs one verb with a resolved config, writing into cfg.out. Throws the
/// library's Error subclasses.
CommandReport run_command(const ExperimentConfig& cfg, const std::string& command, const CommandArgs& args,
                          const LogSink& log = {});

struct PindResult {
  std::vector<double> free;  // optimized p_1, p_2
  double epsilon;            // on the optimization batch
  OptimResult search;
};

/// One state-independent P minimizing the averaged log infidelity over
/// `states`, with the same multi-start search as per-state labeling.
PindResult optimize_pind(const ControlledSystem& system, std::span<const InitialStateParams> states,
                         const BoxBounds& bounds, int restarts, std::uint64_t seed,
                         const NelderMeadOptions& options = {}, unsigned threads = 1);

/// Fidelities with the same free coefficients for every state.
std::vector<double> fixed_weight_fidelities(const ControlledSystem& system, std::span<const InitialStateParams> states,
                                            std::span<const double> free, unsigned threads = 1);

/// States of the theta_1 x theta_2 grid on [0, pi/2]^2 at phi = 0, row-major
/// with theta_1 varying slowest.
std::vector<InitialStateParams> region_grid(std::size_t resolution);

}  // namespace qlc

#endif  // QLC_EXPERIMENT_HPP
