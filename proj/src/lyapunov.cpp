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

#include "qlc/lyapunov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "qlc/error.hpp"
#include "qlc/textio.hpp"

namespace qlc {

ControlledSystem::ControlledSystem(HermitianOperator h0, std::vector<HermitianOperator> controls,
                                   double strength, double horizon, std::size_t goal)
    : h0_(std::move(h0)),
      basis_(eigendecompose(h0_)),
      controls_(std::move(controls)),
      strength_(strength),
      horizon_(horizon),
      goal_(goal) {
  if (controls_.empty()) throw ValidationError("ControlledSystem: need at least one control Hamiltonian");
  for (const auto& c : controls_)
    if (c.dim() != h0_.dim()) throw ValidationError("ControlledSystem: control dimension mismatch");
  if (!(strength_ > 0.0) || !std::isfinite(strength_)) throw ValidationError("ControlledSystem: K must be positive");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ValidationError("ControlledSystem: T must be positive");
  if (goal_ >= h0_.dim()) throw ValidationError("ControlledSystem: goal index out of range");
  const ComplexMatrix u = basis_.unitary();
  const ComplexMatrix ud = u.adjoint();
  controls_eigen_.reserve(controls_.size());
  for (const auto& c : controls_) controls_eigen_.push_back(ud * c.matrix() * u);
}

ControlledSystem ControlledSystem::with_strength(double strength) const {
  ControlledSystem s = *this;
  if (!(strength > 0.0) || !std::isfinite(strength)) throw ValidationError("ControlledSystem: K must be positive");
  s.strength_ = strength;
  return s;
}

ControlledSystem ControlledSystem::with_horizon(double horizon) const {
  ControlledSystem s = *this;
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("ControlledSystem: T must be positive");
  s.horizon_ = horizon;
  return s;
}

LyapunovWeights::LyapunovWeights(std::vector<double> p, std::size_t goal) : p_(std::move(p)), goal_(goal) {
  if (goal_ >= p_.size()) throw ValidationError("LyapunovWeights: goal index out of range");
  for (std::size_t l = 0; l < p_.size(); ++l) {
    if (!std::isfinite(p_[l])) throw ValidationError("LyapunovWeights: non-finite coefficient");
    if (l == goal_ ? p_[l] != 0.0 : !(p_[l] > 0.0)) {
      throw ValidationError("LyapunovWeights: need p_goal = 0 and p_l > 0 otherwise (index " +
                            std::to_string(l) + ")");
    }
  }
}

LyapunovWeights LyapunovWeights::from_free(std::span<const double> free, std::size_t goal, double floor) {
  std::vector<double> p;
  p.reserve(free.size() + 1);
  for (std::size_t i = 0, j = 0; i <= free.size(); ++i) {
    if (i == goal) {
      p.push_back(0.0);
    } else {
      p.push_back(std::max(free[j++], floor));
    }
  }
  return LyapunovWeights(std::move(p), goal);
}

std::vector<double> LyapunovWeights::free() const {
  std::vector<double> out;
  for (std::size_t l = 0; l < p_.size(); ++l)
    if (l != goal_) out.push_back(p_[l]);
  return out;
}

LyapunovWeights LyapunovWeights::scaled(double factor) const {
  std::vector<double> p = p_;
  for (auto& x : p) x *= factor;
  return LyapunovWeights(std::move(p), goal_);
}

HermitianOperator build_p(const LyapunovWeights& weights, const EigenBasis& basis) {
  if (weights.dim() != basis.dim()) throw ValidationError("build_p: dimension mismatch");
  const std::size_t n = basis.dim();
  ComplexMatrix m(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double pl = weights.p()[l];
    if (pl == 0.0) continue;
    const auto& v = basis.eigenvectors[l];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) += pl * v[i] * std::conj(v[j]);
  }
  return HermitianOperator(std::move(m), 1e-10);
}

double control_field(const QuantumState& state, const HermitianOperator& hk, const HermitianOperator& p_op,
                     double strength) {
  if (state.dim() != hk.dim() || hk.dim() != p_op.dim()) throw ValidationError("control_field: dimension mismatch");
  const ComplexMatrix c = Complex(0.0, 1.0) * commutator(hk.matrix(), p_op.matrix());
  const std::size_t n = state.dim();
  Complex s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += c(i, j) * state[j];
    s += std::conj(state[i]) * row;
  }
  double scale = 1.0;
  for (const auto& x : c.data()) scale = std::max(scale, std::abs(x));
  if (std::abs(s.imag()) > 1e-10 * scale) {
    throw NumericError("control_field: imaginary residue " + std::to_string(s.imag()));
  }
  return -strength * s.real();
}

namespace {

constexpr std::size_t kLanes = 4;

bool real_controls(const ControlledSystem& system, const Scheme& scheme) {
  for (std::size_t k : scheme) {
    if (k >= system.controls().size()) return false;
    for (const auto& x : system.control_in_eigenbasis(k).data())
      if (x.imag() != 0.0) return false;
  }
  return true;
}

// Right-hand side of the controlled equation in the eigenbasis of H0, where
// H0 and P are diagonal. With w_k = H_k psi the field reduces to
//   f_k = -K <psi|i[H_k,P]|psi> = 2K Im <w_k|P psi>.
//
// L independent evolutions (lanes) are advanced together; lane data is laid
// out as x[a * L + lane]. Every lane performs exactly the same sequence of
// floating-point operations as a single-lane run, so batching never changes
// results. Dim == 0 selects a runtime dimension. RealH skips the imaginary
// parts of the control matrices (exactly zero when H0 has a real eigenbasis).
template <std::size_t Dim, std::size_t L, bool RealH = false>
class LaneKernel {
 public:
  static constexpr std::size_t kDim = Dim;
  static constexpr std::size_t kLaneCount = L;

  LaneKernel(const ControlledSystem& system, const Scheme& scheme, bool free_evolution)
      : n_(system.dim()), m_(scheme.size()), strength_(system.strength()), free_(free_evolution) {
    if (Dim != 0 && Dim != n_) throw ValidationError("evolve: kernel dimension mismatch");
    if (scheme.empty()) throw ValidationError("evolve: empty control scheme");
    energy_ = system.basis().eigenvalues;
    weight_.assign(n_ * L, 0.0);
    hre_.resize(m_ * n_ * n_);
    him_.resize(m_ * n_ * n_);
    for (std::size_t k = 0; k < m_; ++k) {
      if (scheme[k] >= system.controls().size()) throw ValidationError("evolve: scheme index out of range");
      const auto& h = system.control_in_eigenbasis(scheme[k]);
      for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b) {
          hre_[(k * n_ + a) * n_ + b] = h(a, b).real();
          him_[(k * n_ + a) * n_ + b] = h(a, b).imag();
        }
    }
    if constexpr (Dim == 0) scratch_.assign(4 * n_ * L, 0.0);
    if (RealH && !real_controls(system, scheme)) throw ValidationError("evolve: control matrices are not real");
  }

  void set_weights(std::size_t lane, const LyapunovWeights& w, std::size_t goal) {
    if (w.dim() != n_) throw ValidationError("evolve: weights dimension mismatch");
    if (w.goal() != goal) throw ValidationError("evolve: weights goal differs from system goal");
    for (std::size_t a = 0; a < n_; ++a) weight_[a * L + lane] = w.p()[a];
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t controls() const noexcept { return m_; }

  // (dr, di) = -i (E psi + sum_k f_k H_k psi); f[k * L + lane] receives the fields.
  void operator()(const double* xr, const double* xi, double* dr, double* di, double* f) {
    if constexpr (Dim > 0) {
      std::array<double, Dim * L> wr, wi, gr, gi;
      compute(Dim, xr, xi, dr, di, f, wr.data(), wi.data(), gr.data(), gi.data());
    } else {
      double* s = scratch_.data();
      const std::size_t b = n_ * L;
      compute(n_, xr, xi, dr, di, f, s, s + b, s + 2 * b, s + 3 * b);
    }
  }

  void lyapunov(const double* xr, const double* xi, double* v) const {
    for (std::size_t l = 0; l < L; ++l) v[l] = 0.0;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t i = a * L + l;
        v[l] += weight_[i] * (xr[i] * xr[i] + xi[i] * xi[i]);
      }
  }

 private:
  void compute(std::size_t n, const double* __restrict xr, const double* __restrict xi, double* __restrict dr,
               double* __restrict di, double* __restrict f, double* __restrict wr, double* __restrict wi,
               double* __restrict gr, double* __restrict gi) const {
    const double* __restrict energy = energy_.data();
    const double* __restrict weight = weight_.data();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t l = 0; l < L; ++l) {
        gr[a * L + l] = energy[a] * xr[a * L + l];
        gi[a * L + l] = energy[a] * xi[a * L + l];
      }
    for (std::size_t k = 0; k < m_; ++k) {
      const double* __restrict hr = &hre_[k * n * n];
      const double* __restrict hi = &him_[k * n * n];
      std::array<double, L> imz{};
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t l = 0; l < L; ++l) {
          wr[a * L + l] = 0.0;
          wi[a * L + l] = 0.0;
        }
        for (std::size_t b = 0; b < n; ++b) {
          const double x = hr[a * n + b];
          [[maybe_unused]] const double y = hi[a * n + b];
          if constexpr (RealH) {
            for (std::size_t l = 0; l < L; ++l) {
              wr[a * L + l] += x * xr[b * L + l];
              wi[a * L + l] += x * xi[b * L + l];
            }
          } else {
            for (std::size_t l = 0; l < L; ++l) {
              wr[a * L + l] += x * xr[b * L + l] - y * xi[b * L + l];
              wi[a * L + l] += x * xi[b * L + l] + y * xr[b * L + l];
            }
          }
        }
        for (std::size_t l = 0; l < L; ++l) {
          const std::size_t i = a * L + l;
          imz[l] += weight[i] * (wr[i] * xi[i] - wi[i] * xr[i]);
        }
      }
      for (std::size_t l = 0; l < L; ++l) f[k * L + l] = free_ ? 0.0 : 2.0 * strength_ * imz[l];
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t l = 0; l < L; ++l) {
          gr[a * L + l] += f[k * L + l] * wr[a * L + l];
          gi[a * L + l] += f[k * L + l] * wi[a * L + l];
        }
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t l = 0; l < L; ++l) {
        dr[a * L + l] = gi[a * L + l];
        di[a * L + l] = -gr[a * L + l];
      }
  }

  std::size_t n_, m_;
  double strength_;
  bool free_;
  std::vector<double> energy_, weight_, hre_, him_, scratch_;
};

std::size_t step_count(double horizon, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("evolve: dt must be positive");
  const double ratio = horizon / dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps < 1 || std::abs(static_cast<double>(steps) * dt - horizon) > 1e-9 * horizon) {
    throw ValidationError("evolve: dt does not divide the horizon T");
  }
  return steps;
}

// RK4 over all lanes in place. `on_sample(step, xr, xi, fields)` is called at
// step 0 and after every completed step. Returns the largest
// pre-renormalization norm drift over all lanes.
template <class Kernel, class OnSample>
double integrate(Kernel& rhs, std::vector<double>& xr, std::vector<double>& xi, std::size_t steps, double dt,
                 OnSample&& on_sample) {
  constexpr std::size_t L = Kernel::kLaneCount;
  const std::size_t n = Kernel::kDim ? Kernel::kDim : rhs.dim();
  const std::size_t nl = n * L;
  std::vector<double> buf(10 * nl);
  double* __restrict k1r = buf.data();
  double* __restrict k1i = k1r + nl;
  double* __restrict k2r = k1i + nl;
  double* __restrict k2i = k2r + nl;
  double* __restrict k3r = k2i + nl;
  double* __restrict k3i = k3r + nl;
  double* __restrict k4r = k3i + nl;
  double* __restrict k4i = k4r + nl;
  double* __restrict tr = k4i + nl;
  double* __restrict ti = tr + nl;
  std::vector<double> f(rhs.controls() * L), f0(rhs.controls() * L);
  double* __restrict pr = xr.data();
  double* __restrict pi = xi.data();

  double max_drift = 0.0;
  const double h2 = 0.5 * dt, h6 = dt / 6.0;
  rhs(pr, pi, k1r, k1i, f0.data());
  on_sample(std::size_t{0}, pr, pi, f0.data());
  for (std::size_t s = 1; s <= steps; ++s) {
    for (std::size_t i = 0; i < nl; ++i) {
      tr[i] = pr[i] + h2 * k1r[i];
      ti[i] = pi[i] + h2 * k1i[i];
    }
    rhs(tr, ti, k2r, k2i, f.data());
    for (std::size_t i = 0; i < nl; ++i) {
      tr[i] = pr[i] + h2 * k2r[i];
      ti[i] = pi[i] + h2 * k2i[i];
    }
    rhs(tr, ti, k3r, k3i, f.data());
    for (std::size_t i = 0; i < nl; ++i) {
      tr[i] = pr[i] + dt * k3r[i];
      ti[i] = pi[i] + dt * k3i[i];
    }
    rhs(tr, ti, k4r, k4i, f.data());
    std::array<double, L> norm2{};
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t i = a * L + l;
        pr[i] += h6 * (k1r[i] + 2.0 * (k2r[i] + k3r[i]) + k4r[i]);
        pi[i] += h6 * (k1i[i] + 2.0 * (k2i[i] + k3i[i]) + k4i[i]);
        norm2[l] += pr[i] * pr[i] + pi[i] * pi[i];
      }
    for (std::size_t l = 0; l < L; ++l) {
      const double norm = std::sqrt(norm2[l]);
      const double drift = std::abs(norm - 1.0);
      if (!(drift <= 1e-6)) {
        throw NumericError("evolve: norm drift " + std::to_string(drift) + " at step " + std::to_string(s) +
                           "; integrator unstable, use a smaller dt");
      }
      max_drift = std::max(max_drift, drift);
      const double inv = 1.0 / norm;
      for (std::size_t a = 0; a < n; ++a) {
        pr[a * L + l] *= inv;
        pi[a * L + l] *= inv;
      }
    }
    // k1 of the next step doubles as the field sample at this grid point.
    rhs(pr, pi, k1r, k1i, f0.data());
    on_sample(s, pr, pi, f0.data());
  }
  return max_drift;
}

template <std::size_t D, class Body>
decltype(auto) dispatch_real(bool real, Body&& body) {
  if (real) return body(std::integral_constant<std::size_t, D>{}, std::true_type{});
  return body(std::integral_constant<std::size_t, D>{}, std::false_type{});
}

// Calls body(integral_constant<size_t, Dim>, bool_constant<RealH>) with Dim
// specialized for small systems and 0 (runtime dimension) otherwise.
template <class Body>
decltype(auto) dispatch_kernel(const ControlledSystem& system, const Scheme& scheme, Body&& body) {
  const bool real = real_controls(system, scheme);
  switch (system.dim()) {
    case 2:
      return dispatch_real<2>(real, body);
    case 3:
      return dispatch_real<3>(real, body);
    case 4:
      return dispatch_real<4>(real, body);
    case 5:
      return dispatch_real<5>(real, body);
    case 6:
      return dispatch_real<6>(real, body);
    default:
      return dispatch_real<0>(real, body);
  }
}

std::vector<Complex> to_eigen(const ControlledSystem& system, const QuantumState& state) {
  const std::size_t n = system.dim();
  if (state.dim() != n) throw ValidationError("evolve: initial state dimension mismatch");
  std::vector<Complex> c(n);
  for (std::size_t l = 0; l < n; ++l) c[l] = inner(system.basis().eigenvectors[l], state);
  return c;
}

template <std::size_t L>
void load_lane(std::vector<double>& xr, std::vector<double>& xi, std::size_t lane, std::span<const Complex> amps) {
  for (std::size_t a = 0; a < amps.size(); ++a) {
    xr[a * L + lane] = amps[a].real();
    xi[a * L + lane] = amps[a].imag();
  }
}

}  // namespace

ControlTrajectory evolve(const ControlledSystem& system, const QuantumState& initial, const LyapunovWeights& weights,
                         const Scheme& scheme, double dt, const EvolveOptions& options) {
  const std::size_t steps = step_count(system.horizon(), dt);
  const double h = system.horizon() / static_cast<double>(steps);
  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  const std::size_t n = system.dim();
  const auto amps0 = to_eigen(system, initial);
  const auto& basis = system.basis();

  ControlTrajectory traj;
  const std::size_t samples = steps / stride + 2;
  traj.times.reserve(samples);
  traj.states.reserve(samples);
  traj.fields.reserve(samples);
  traj.lyapunov.reserve(samples);
  std::vector<double> xr(n), xi(n);
  load_lane<1>(xr, xi, 0, amps0);

  dispatch_kernel(system, scheme, [&](auto dim, auto real) {
    LaneKernel<decltype(dim)::value, 1, decltype(real)::value> rhs(system, scheme, options.free_evolution);
    rhs.set_weights(0, weights, system.goal());
    auto record = [&](std::size_t s, const double* r, const double* i, const double* f) {
      if (s % stride != 0 && s != steps) return;
      std::vector<Complex> amps(n);
      for (std::size_t l = 0; l < n; ++l) {
        const Complex c(r[l], i[l]);
        for (std::size_t a = 0; a < n; ++a) amps[a] += c * basis.eigenvectors[l][a];
      }
      double v = 0.0;
      rhs.lyapunov(r, i, &v);
      traj.times.push_back(s == steps ? system.horizon() : static_cast<double>(s) * h);
      traj.states.push_back(QuantumState::normalized(std::move(amps)));
      traj.fields.emplace_back(f, f + rhs.controls());
      traj.lyapunov.push_back(v);
    };
    traj.max_step_drift = integrate(rhs, xr, xi, steps, h, record);
  });
  const std::size_t g = system.goal();
  traj.final_fidelity = std::min(1.0, xr[g] * xr[g] + xi[g] * xi[g]);
  return traj;
}

double final_fidelity_eigen(const ControlledSystem& system, std::span<const Complex> eigen_amplitudes,
                            const LyapunovWeights& weights, const Scheme& scheme, double dt) {
  const FidelityJob job{std::vector<Complex>(eigen_amplitudes.begin(), eigen_amplitudes.end()), weights};
  return final_fidelity_batch(system, std::span<const FidelityJob>(&job, 1), scheme, dt).front();
}

double final_fidelity(const ControlledSystem& system, const QuantumState& initial, const LyapunovWeights& weights,
                      const Scheme& scheme, double dt) {
  return final_fidelity_eigen(system, to_eigen(system, initial), weights, scheme, dt);
}

std::vector<double> final_fidelity_batch(const ControlledSystem& system, std::span<const FidelityJob> jobs,
                                         const Scheme& scheme, double dt) {
  const std::size_t steps = step_count(system.horizon(), dt);
  const double h = system.horizon() / static_cast<double>(steps);
  const std::size_t n = system.dim();
  const std::size_t g = system.goal();
  for (const auto& job : jobs)
    if (job.eigen_amplitudes.size() != n) throw ValidationError("evolve: initial state dimension mismatch");
  std::vector<double> out(jobs.size());
  auto noop = [](std::size_t, const double*, const double*, const double*) {};

  dispatch_kernel(system, scheme, [&](auto dim, auto real) {
    constexpr std::size_t D = decltype(dim)::value;
    constexpr bool R = decltype(real)::value;
    // Full chunks run kLanes-wide; the remainder runs one lane at a time.
    auto run = [&](auto lanes, std::size_t first) {
      constexpr std::size_t L = decltype(lanes)::value;
      LaneKernel<D, L, R> rhs(system, scheme, false);
      std::vector<double> xr(n * L), xi(n * L);
      for (std::size_t l = 0; l < L; ++l) {
        const auto& job = jobs[first + l];
        load_lane<L>(xr, xi, l, job.eigen_amplitudes);
        rhs.set_weights(l, job.weights, g);
      }
      integrate(rhs, xr, xi, steps, h, noop);
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t i = g * L + l;
        out[first + l] = std::min(1.0, xr[i] * xr[i] + xi[i] * xi[i]);
      }
    };
    std::size_t first = 0;
    if constexpr (D != 0) {
      for (; first + kLanes <= jobs.size(); first += kLanes) run(std::integral_constant<std::size_t, kLanes>{}, first);
    }
    for (; first < jobs.size(); ++first) run(std::integral_constant<std::size_t, 1>{}, first);
  });
  return out;
}

double lyapunov_rate_check(const ControlTrajectory& traj, double strength) {
  // Five-point stencils, 12h * dV/dt at window offsets 1, 2, 3.
  static constexpr double kStencil[3][5] = {
      {-3.0, -10.0, 18.0, -6.0, 1.0}, {1.0, -8.0, 0.0, 8.0, -1.0}, {-1.0, 6.0, -18.0, 10.0, 3.0}};
  const auto& t = traj.times;
  const auto& v = traj.lyapunov;
  const std::size_t count = t.size();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    double dvdt;
    const std::size_t s = count >= 5 ? std::min(i > 2 ? i - 2 : 0, count - 5) : 0;
    bool uniform = count >= 5;
    const double h = uniform ? t[s + 1] - t[s] : 0.0;
    for (std::size_t j = s + 1; uniform && j < s + 4; ++j)
      uniform = std::abs((t[j + 1] - t[j]) - h) <= 1e-9 * h;
    if (uniform) {
      const auto& w = kStencil[i - s - 1];
      dvdt = 0.0;
      for (std::size_t j = 0; j < 5; ++j) dvdt += w[j] * v[s + j];
      dvdt /= 12.0 * h;
    } else {
      const double h1 = t[i] - t[i - 1];
      const double h2 = t[i + 1] - t[i];
      dvdt = (-h2 / (h1 * (h1 + h2))) * v[i - 1] + ((h2 - h1) / (h1 * h2)) * v[i] + (h1 / (h2 * (h1 + h2))) * v[i + 1];
    }
    double power = 0.0;
    for (double f : traj.fields[i]) power += f * f;
    worst = std::max(worst, std::abs(dvdt + power / strength));
  }
  return worst;
}

void write_trajectory(std::ostream& out, const ControlTrajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().dim();
  const std::size_t m = traj.fields.empty() ? 0 : traj.fields.front().size();
  out << "# qlc-trajectory v1\n";
  out << "# dim=" << n << " controls=" << m << " final_fidelity=" << format_double(traj.final_fidelity) << '\n';
  out << "# t";
  for (std::size_t a = 1; a <= n; ++a) out << " re" << a << " im" << a;
  for (std::size_t k = 1; k <= m; ++k) out << " f" << k;
  out << " V\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << format_double(traj.times[i]);
    for (const auto& c : traj.states[i].amplitudes()) out << ' ' << format_double(c.real()) << ' ' << format_double(c.imag());
    for (double f : traj.fields[i]) out << ' ' << format_double(f);
    out << ' ' << format_double(traj.lyapunov[i]) << '\n';
  }
}

ControlTrajectory read_trajectory(std::istream& in) {
  ControlTrajectory traj;
  std::string line;
  int lineno = 0;
  long long n = -1, m = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      for (auto tok : split(s.substr(1))) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "dim") n = parse_int(val, lineno);
        if (key == "controls") m = parse_int(val, lineno);
        if (key == "final_fidelity") traj.final_fidelity = parse_double(val, lineno);
      }
      continue;
    }
    if (n < 1 || m < 0) throw ParseError("trajectory data before dim/controls header", lineno);
    const auto tok = split(s);
    const auto expect = static_cast<std::size_t>(1 + 2 * n + m + 1);
    if (tok.size() != expect) throw ParseError("expected " + std::to_string(expect) + " columns", lineno);
    std::size_t c = 0;
    traj.times.push_back(parse_double(tok[c++], lineno));
    std::vector<Complex> amps(static_cast<std::size_t>(n));
    for (auto& a : amps) {
      const double re = parse_double(tok[c++], lineno);
      a = {re, parse_double(tok[c++], lineno)};
    }
    traj.states.emplace_back(std::move(amps));
    std::vector<double> f(static_cast<std::size_t>(m));
    for (auto& x : f) x = parse_double(tok[c++], lineno);
    traj.fields.push_back(std::move(f));
    traj.lyapunov.push_back(parse_double(tok[c++], lineno));
  }
  return traj;
}

}  // namespace qlc
