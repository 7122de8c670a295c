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

// Derivative-free box-constrained minimization: Nelder-Mead with every trial
// point clamped into the box, restarted from seeded random interior points.

#ifndef QLC_OPTIM_HPP
#define QLC_OPTIM_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qlc/lyapunov.hpp"

namespace qlc {

class BoxBounds {
 public:
  BoxBounds(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const noexcept { return lower_.size(); }
  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> upper() const noexcept { return upper_; }
  double range(std::size_t i) const { return upper_[i] - lower_[i]; }
  void clamp(std::span<double> x) const;
  bool contains(std::span<const double> x) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

struct NelderMeadOptions {
  /// Stop once every vertex is within x_tol (max-norm) of the best one and
  /// every value within f_tol of the best value.
  double x_tol = 1e-6;
  double f_tol = 1e-8;
  int max_evals = 400;
  /// Initial simplex edge as a fraction of each box side.
  double initial_step = 0.1;
  /// Random starts keep this fraction of each side away from the faces.
  double start_margin = 0.02;
};

struct OptimResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  int restarts_used = 0;
  long evals = 0;
};

/// One Nelder-Mead run driven from outside: ask() yields the next point to
/// evaluate and tell() consumes its value. Lets several runs share batched
/// objective evaluations without changing any single run's path.
class NelderMead {
 public:
  NelderMead(std::vector<double> start, const BoxBounds& bounds, const NelderMeadOptions& options = {});

  bool done() const noexcept { return done_; }
  const std::vector<double>& ask() const noexcept { return trial_; }
  /// Throws OptimizationError if `value` is not finite.
  void tell(double value);

  const std::vector<double>& best_x() const noexcept { return x_[order_.front()]; }
  double best_f() const noexcept { return f_[order_.front()]; }
  long evals() const noexcept { return evals_; }

 private:
  enum class Phase { kInit, kReflect, kExpand, kContractOut, kContractIn, kShrink };

  void start_iteration();
  void sort_vertices();
  void replace_worst(const std::vector<double>& x, double f);
  void begin_shrink();
  std::vector<double> along(double coef) const;  // centroid + coef * (centroid - worst), clamped

  const BoxBounds& bounds_;
  NelderMeadOptions opt_;
  std::size_t n_;
  std::vector<std::vector<double>> x_;
  std::vector<double> f_;
  std::vector<std::size_t> order_;  // vertex indices sorted by value
  std::vector<double> centroid_;
  std::vector<double> trial_;
  std::vector<double> reflected_;
  double f_reflected_ = 0.0;
  Phase phase_ = Phase::kInit;
  std::size_t pending_ = 0;  // vertex being (re)evaluated in init/shrink
  long evals_ = 0;
  bool done_ = false;
};

using Objective = std::function<double(std::span<const double>)>;
/// Evaluates several points at once; must return one value per point.
using BatchObjective = std::function<std::vector<double>(std::span<const std::vector<double>>)>;

/// Runs `restarts` independent Nelder-Mead searches from uniform random
/// starts (restart r draws from substream r of `seed`) and keeps the best.
OptimResult minimize_multistart(const Objective& objective, const BoxBounds& bounds, int restarts,
                                std::uint64_t seed, const NelderMeadOptions& options = {});

/// Same searches with the restarts advanced in lockstep so each round's
/// points go to the objective as one batch. Results equal the scalar form.
OptimResult minimize_multistart_batch(const BatchObjective& objective, const BoxBounds& bounds, int restarts,
                                      std::uint64_t seed, const NelderMeadOptions& options = {});

inline constexpr double kWeightFloor = 1e-9;

struct WeightOptimum {
  LyapunovWeights weights;
  double infidelity;
  OptimResult search;
};

/// Minimizes 1 - F(T) over the n-1 free Lyapunov coefficients. Coefficients
/// below kWeightFloor are raised to it so every candidate satisfies p_l > 0.
WeightOptimum optimize_lyapunov_weights(const ControlledSystem& system, const InitialStateParams& initial,
                                        const BoxBounds& bounds, int restarts, std::uint64_t seed,
                                        const NelderMeadOptions& options = {});

}  // namespace qlc

#endif  // QLC_OPTIM_HPP
