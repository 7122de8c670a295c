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

#include "qlc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qlc/error.hpp"
#include "qlc/rng.hpp"

namespace qlc {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

std::string describe_point(std::span<const double> x) {
  std::ostringstream s;
  s.precision(17);
  s << '(';
  for (std::size_t i = 0; i < x.size(); ++i) s << (i ? ", " : "") << x[i];
  s << ')';
  return s.str();
}

std::vector<double> random_start(const BoxBounds& b, double margin, Rng& rng) {
  std::vector<double> x(b.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pad = margin * b.range(i);
    x[i] = rng.uniform(b.lower()[i] + pad, b.upper()[i] - pad);
  }
  return x;
}

}  // namespace

BoxBounds::BoxBounds(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw ValidationError("box bounds need matching non-empty lower/upper vectors");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i]))
      throw ValidationError("box bound " + std::to_string(i) + " needs finite lower < upper");
  }
}

void BoxBounds::clamp(std::span<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower_[i], upper_[i]);
}

bool BoxBounds::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
  return true;
}

NelderMead::NelderMead(std::vector<double> start, const BoxBounds& bounds, const NelderMeadOptions& options)
    : bounds_(bounds), opt_(options), n_(bounds.dim()) {
  if (start.size() != n_) throw ValidationError("start point dimension does not match the bounds");
  if (opt_.max_evals < static_cast<int>(n_) + 1) throw ValidationError("max_evals smaller than the simplex");
  bounds_.clamp(start);
  x_.assign(n_ + 1, start);
  for (std::size_t i = 0; i < n_; ++i) {
    const double step = opt_.initial_step * bounds_.range(i);
    double& xi = x_[i + 1][i];
    xi = (xi + step <= bounds_.upper()[i]) ? xi + step : xi - step;
  }
  f_.assign(n_ + 1, 0.0);
  order_.resize(n_ + 1);
  std::iota(order_.begin(), order_.end(), 0);
  centroid_.assign(n_, 0.0);
  phase_ = Phase::kInit;
  pending_ = 0;
  trial_ = x_[0];
}

void NelderMead::sort_vertices() {
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return f_[a] < f_[b]; });
}

std::vector<double> NelderMead::along(double coef) const {
  const auto& worst = x_[order_.back()];
  std::vector<double> p(n_);
  for (std::size_t i = 0; i < n_; ++i) p[i] = centroid_[i] + coef * (centroid_[i] - worst[i]);
  bounds_.clamp(p);
  return p;
}

void NelderMead::replace_worst(const std::vector<double>& x, double f) {
  x_[order_.back()] = x;
  f_[order_.back()] = f;
  start_iteration();
}

void NelderMead::begin_shrink() {
  phase_ = Phase::kShrink;
  const auto& best = x_[order_.front()];
  for (std::size_t v = 1; v <= n_; ++v) {
    auto& xv = x_[order_[v]];
    for (std::size_t i = 0; i < n_; ++i) xv[i] = best[i] + kShrink * (xv[i] - best[i]);
  }
  pending_ = 1;
  trial_ = x_[order_[pending_]];
}

void NelderMead::start_iteration() {
  sort_vertices();
  const auto& best = x_[order_.front()];
  const double fbest = f_[order_.front()];
  double diameter = 0.0;
  double spread = 0.0;
  for (std::size_t v = 1; v <= n_; ++v) {
    const auto& xv = x_[order_[v]];
    for (std::size_t i = 0; i < n_; ++i) diameter = std::max(diameter, std::abs(xv[i] - best[i]));
    spread = std::max(spread, std::abs(f_[order_[v]] - fbest));
  }
  if ((diameter <= opt_.x_tol && spread <= opt_.f_tol) || evals_ >= opt_.max_evals) {
    done_ = true;
    return;
  }
  std::fill(centroid_.begin(), centroid_.end(), 0.0);
  for (std::size_t v = 0; v < n_; ++v)
    for (std::size_t i = 0; i < n_; ++i) centroid_[i] += x_[order_[v]][i];
  for (auto& c : centroid_) c /= static_cast<double>(n_);
  phase_ = Phase::kReflect;
  trial_ = along(kReflect);
}

void NelderMead::tell(double value) {
  if (done_) throw OptimizationError("tell() on a finished Nelder-Mead run");
  if (!std::isfinite(value))
    throw OptimizationError("objective is not finite at " + describe_point(trial_));
  ++evals_;
  const double f_worst = f_[order_.back()];
  const double f_second = f_[order_[n_ - 1]];
  const double f_best = f_[order_.front()];
  switch (phase_) {
    case Phase::kInit:
      f_[pending_] = value;
      if (++pending_ <= n_) {
        trial_ = x_[pending_];
        if (evals_ >= opt_.max_evals) {
          // Not enough budget for a full simplex: keep what was evaluated.
          x_.resize(pending_);
          f_.resize(pending_);
          order_.resize(pending_);
          sort_vertices();
          done_ = true;
        }
        return;
      }
      start_iteration();
      return;
    case Phase::kReflect:
      if (value < f_best) {
        reflected_ = trial_;
        f_reflected_ = value;
        if (evals_ >= opt_.max_evals) return replace_worst(reflected_, f_reflected_);
        phase_ = Phase::kExpand;
        trial_ = along(kExpand);
      } else if (value < f_second) {
        replace_worst(trial_, value);
      } else if (evals_ >= opt_.max_evals) {
        if (value < f_worst) return replace_worst(trial_, value);
        done_ = true;
      } else if (value < f_worst) {
        reflected_ = trial_;
        f_reflected_ = value;
        phase_ = Phase::kContractOut;
        trial_ = along(kContract);
      } else {
        phase_ = Phase::kContractIn;
        trial_ = along(-kContract);
      }
      return;
    case Phase::kExpand:
      if (value < f_reflected_) {
        const auto x = trial_;
        replace_worst(x, value);
      } else {
        replace_worst(reflected_, f_reflected_);
      }
      return;
    case Phase::kContractOut:
      if (value <= f_reflected_) {
        const auto x = trial_;
        replace_worst(x, value);
      } else if (evals_ >= opt_.max_evals) {
        replace_worst(reflected_, f_reflected_);
      } else {
        begin_shrink();
      }
      return;
    case Phase::kContractIn:
      if (value < f_worst) {
        const auto x = trial_;
        replace_worst(x, value);
      } else if (evals_ >= opt_.max_evals) {
        done_ = true;
      } else {
        begin_shrink();
      }
      return;
    case Phase::kShrink:
      f_[order_[pending_]] = value;
      if (++pending_ <= n_) {
        trial_ = x_[order_[pending_]];
        if (evals_ >= opt_.max_evals) {
          // Vertices not yet re-evaluated still carry stale values; drop them.
          std::vector<std::vector<double>> xs;
          std::vector<double> fs;
          for (std::size_t v = 0; v < pending_; ++v) {
            xs.push_back(x_[order_[v]]);
            fs.push_back(f_[order_[v]]);
          }
          x_ = std::move(xs);
          f_ = std::move(fs);
          order_.resize(x_.size());
          sort_vertices();
          done_ = true;
        }
        return;
      }
      start_iteration();
      return;
  }
}

OptimResult minimize_multistart_batch(const BatchObjective& objective, const BoxBounds& bounds, int restarts,
                                      std::uint64_t seed, const NelderMeadOptions& options) {
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  std::vector<NelderMead> runs;
  runs.reserve(static_cast<std::size_t>(restarts));
  for (int r = 0; r < restarts; ++r) {
    Rng rng = Rng::substream(seed, "restart", static_cast<std::uint64_t>(r));
    runs.emplace_back(random_start(bounds, options.start_margin, rng), bounds, options);
  }
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> owners;
  for (;;) {
    points.clear();
    owners.clear();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (runs[r].done()) continue;
      points.push_back(runs[r].ask());
      owners.push_back(r);
    }
    if (points.empty()) break;
    const auto values = objective(points);
    if (values.size() != points.size()) throw OptimizationError("batch objective returned the wrong count");
    for (std::size_t j = 0; j < owners.size(); ++j) runs[owners[j]].tell(values[j]);
  }
  OptimResult out;
  out.restarts_used = restarts;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    out.evals += runs[r].evals();
    if (r == 0 || runs[r].best_f() < out.f_best) {
      out.f_best = runs[r].best_f();
      out.x_best = runs[r].best_x();
    }
  }
  return out;
}

OptimResult minimize_multistart(const Objective& objective, const BoxBounds& bounds, int restarts,
                                std::uint64_t seed, const NelderMeadOptions& options) {
  return minimize_multistart_batch(
      [&](std::span<const std::vector<double>> pts) {
        std::vector<double> v;
        v.reserve(pts.size());
        for (const auto& p : pts) v.push_back(objective(p));
        return v;
      },
      bounds, restarts, seed, options);
}

WeightOptimum optimize_lyapunov_weights(const ControlledSystem& system, const InitialStateParams& initial,
                                        const BoxBounds& bounds, int restarts, std::uint64_t seed,
                                        const NelderMeadOptions& options) {
  const std::size_t n = system.dim();
  if (bounds.dim() != n - 1)
    throw ValidationError("weight bounds need " + std::to_string(n - 1) + " dimensions");
  const auto amplitudes = eigen_coefficients(initial);
  Scheme scheme(system.controls().size());
  std::iota(scheme.begin(), scheme.end(), 0);
  const double dt = system.default_dt();
  const auto batch = [&](std::span<const std::vector<double>> pts) {
    std::vector<FidelityJob> jobs;
    jobs.reserve(pts.size());
    for (const auto& p : pts)
      jobs.push_back({amplitudes, LyapunovWeights::from_free(p, system.goal(), kWeightFloor)});
    auto fid = final_fidelity_batch(system, jobs, scheme, dt);
    for (auto& f : fid) f = 1.0 - f;
    return fid;
  };
  auto search = minimize_multistart_batch(batch, bounds, restarts, seed, options);
  auto weights = LyapunovWeights::from_free(search.x_best, system.goal(), kWeightFloor);
  const double infidelity = search.f_best;
  return {std::move(weights), infidelity, std::move(search)};
}

}  // namespace qlc
