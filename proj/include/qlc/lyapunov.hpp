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

// Lyapunov feedback control of a closed system
//
//   d|psi>/dt = -i [H0 + sum_k f_k(t) H_k] |psi>,
//   V = <psi|P|psi>,  P = sum_l p_l |E_l><E_l|,
//   f_k = -K <psi| i[H_k, P] |psi>,
//
// so that dV/dt = -(1/K) sum_k f_k^2 <= 0 along the controlled trajectory.

#ifndef QLC_LYAPUNOV_HPP
#define QLC_LYAPUNOV_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "qlc/quantum.hpp"

namespace qlc {

inline constexpr std::size_t kDefaultStepsPerHorizon = 4000;

/// Drift Hamiltonian, its eigenbasis, candidate control Hamiltonians, the
/// field strength K and the control horizon T. The goal is eigenstate
/// |E_goal> (0-based index into the ascending eigenbasis).
class ControlledSystem {
 public:
  ControlledSystem(HermitianOperator h0, std::vector<HermitianOperator> controls, double strength,
                   double horizon, std::size_t goal);

  const HermitianOperator& h0() const noexcept { return h0_; }
  const EigenBasis& basis() const noexcept { return basis_; }
  const std::vector<HermitianOperator>& controls() const noexcept { return controls_; }
  /// Control Hamiltonian k expressed in the eigenbasis of H0.
  const ComplexMatrix& control_in_eigenbasis(std::size_t k) const { return controls_eigen_.at(k); }
  double strength() const noexcept { return strength_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t goal() const noexcept { return goal_; }
  std::size_t dim() const noexcept { return h0_.dim(); }
  const QuantumState& goal_state() const { return basis_.eigenvectors[goal_]; }

  ControlledSystem with_strength(double strength) const;
  ControlledSystem with_horizon(double horizon) const;

  /// T / kDefaultStepsPerHorizon
  double default_dt() const noexcept { return horizon_ / static_cast<double>(kDefaultStepsPerHorizon); }

 private:
  HermitianOperator h0_;
  EigenBasis basis_;
  std::vector<HermitianOperator> controls_;
  std::vector<ComplexMatrix> controls_eigen_;
  double strength_;
  double horizon_;
  std::size_t goal_;
};

/// Coefficients p_l of P. p[goal] == 0 and every other p_l > 0.
class LyapunovWeights {
 public:
  LyapunovWeights(std::vector<double> p, std::size_t goal);

  /// Builds weights from the n-1 free coefficients (goal entry omitted),
  /// raising any value below `floor` up to it.
  static LyapunovWeights from_free(std::span<const double> free, std::size_t goal,
                                   double floor = 0.0);

  std::span<const double> p() const noexcept { return p_; }
  std::size_t goal() const noexcept { return goal_; }
  std::size_t dim() const noexcept { return p_.size(); }
  /// The n-1 coefficients with the goal entry removed.
  std::vector<double> free() const;
  /// Same weights with every coefficient multiplied by `factor` > 0.
  LyapunovWeights scaled(double factor) const;

 private:
  std::vector<double> p_;
  std::size_t goal_;
};

/// Indices into ControlledSystem::controls() that are switched on.
using Scheme = std::vector<std::size_t>;

struct ControlTrajectory {
  std::vector<double> times;
  std::vector<QuantumState> states;
  /// fields[i][k]: field of the k-th scheme control at times[i].
  std::vector<std::vector<double>> fields;
  std::vector<double> lyapunov;
  double final_fidelity = 0.0;
  /// Largest | ||psi|| - 1 | seen before per-step renormalization.
  double max_step_drift = 0.0;
};

struct EvolveOptions {
  /// Record every `stride`-th step (the final step is always recorded).
  std::size_t stride = 1;
  /// Force every field to zero (uncontrolled drift evolution).
  bool free_evolution = false;
};

/// P = sum_l p_l |E_l><E_l|
HermitianOperator build_p(const LyapunovWeights& weights, const EigenBasis& basis);

/// f = -K <psi| i[H_k, P] |psi>
double control_field(const QuantumState& state, const HermitianOperator& hk,
                     const HermitianOperator& p_op, double strength);

/// Classical RK4 with the feedback fields recomputed at each stage and
/// per-step renormalization. `dt` must divide the horizon.
ControlTrajectory evolve(const ControlledSystem& system, const QuantumState& initial,
                         const LyapunovWeights& weights, const Scheme& scheme, double dt,
                         const EvolveOptions& options = {});

/// Same dynamics as evolve() without recording; returns |<E_goal|psi(T)>|^2.
double final_fidelity(const ControlledSystem& system, const QuantumState& initial,
                      const LyapunovWeights& weights, const Scheme& scheme, double dt);

/// Fidelity from eigenbasis amplitudes (skips the basis change).
double final_fidelity_eigen(const ControlledSystem& system, std::span<const Complex> eigen_amplitudes,
                            const LyapunovWeights& weights, const Scheme& scheme, double dt);

struct FidelityJob {
  /// Initial amplitudes on |E_1> .. |E_n>.
  std::vector<Complex> eigen_amplitudes;
  LyapunovWeights weights;
};

/// final_fidelity_eigen for many (state, weights) pairs. Independent jobs are
/// interleaved for throughput; each result is bit-identical to the
/// single-job call.
std::vector<double> final_fidelity_batch(const ControlledSystem& system, std::span<const FidelityJob> jobs,
                                         const Scheme& scheme, double dt);

/// max over interior samples of |dV/dt + (1/K) sum_k f_k^2|, dV/dt by
/// fourth-order five-point differences on the recorded grid (three-point
/// where the grid is short or unevenly spaced).
double lyapunov_rate_check(const ControlTrajectory& traj, double strength);

/// Columnar text: t, Re/Im of each amplitude, each field, V.
void write_trajectory(std::ostream& out, const ControlTrajectory& traj);
ControlTrajectory read_trajectory(std::istream& in);

}  // namespace qlc

#endif  // QLC_LYAPUNOV_HPP
