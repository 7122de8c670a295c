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

// General regression network: a Gaussian-weighted average of stored
// training outputs,
//
//   y_j(x) = sum_k Y_kj u_k / sum_k u_k,  u_k = exp(-|x' - X'_k|^2 / (2 sigma^2)),
//
// over normalized inputs x'.

#ifndef QLC_GRNN_HPP
#define QLC_GRNN_HPP

#include <optional>
#include <string>
#include <vector>

#include "qlc/features.hpp"
#include "qlc/lyapunov.hpp"

namespace qlc {

class GrnnModel {
 public:
  /// Fits the normalizer on `x` (a single sample maps every input to 0),
  /// stores normalized inputs with raw outputs sorted by input so that
  /// sample order never affects results, and sets D = 2 / N^{1/n_I}.
  static GrnnModel build(const RowMatrix& x, const RowMatrix& y);

  std::size_t size() const noexcept { return inputs_.rows; }
  std::size_t inputs() const noexcept { return inputs_.cols; }
  std::size_t outputs() const noexcept { return outputs_.cols; }
  double spacing() const noexcept { return spacing_; }
  const Normalizer& normalizer() const noexcept { return normalizer_; }
  const RowMatrix& stored_inputs() const noexcept { return inputs_; }
  const RowMatrix& stored_outputs() const noexcept { return outputs_; }
  std::optional<double> sigma() const noexcept { return sigma_; }
  void set_sigma(double sigma);

  /// Prediction for one raw (unnormalized) input. If every pattern weight
  /// underflows, returns the nearest stored sample's output (lowest stored
  /// index on ties). Each call warns once when that happened and adds the
  /// number of such predictions to *fallbacks when given.
  std::vector<double> predict(std::span<const double> x, double sigma, std::size_t* fallbacks = nullptr) const;
  /// Uses the model's own sigma.
  std::vector<double> predict(std::span<const double> x, std::size_t* fallbacks = nullptr) const;
  RowMatrix predict(const RowMatrix& x, double sigma, std::size_t* fallbacks = nullptr) const;
  /// One prediction matrix per sigma, sharing the distance computation.
  std::vector<RowMatrix> predict_sweep(const RowMatrix& x, std::span<const double> sigmas,
                                       std::size_t* fallbacks = nullptr) const;

  std::string to_json() const;
  static GrnnModel from_json(const std::string& text);

 private:
  GrnnModel(Normalizer normalizer, RowMatrix inputs, RowMatrix outputs, double spacing);
  /// True when every weight underflowed and the nearest sample was used.
  bool predict_from_distances(std::span<const double> d2, double sigma, std::span<double> out) const;

  Normalizer normalizer_;
  RowMatrix inputs_;
  RowMatrix outputs_;
  double spacing_;
  std::optional<double> sigma_;
};

/// 2 / N^{1/n_I}
double grnn_spacing(std::size_t samples, std::size_t inputs);

/// 40 points spaced geometrically over [0.001 D, D] plus 0.5 D, ascending.
std::vector<double> default_sigma_grid(double spacing);

struct LogInfidelity {
  double value;
  /// Entries with F >= 1 that were evaluated at 1 - 1e-12.
  std::size_t clamped;
};

/// (1/N) sum_k log10(1 - F_k)
LogInfidelity avg_log_infidelity(std::span<const double> fidelities);

/// Fraction of fidelities strictly above `threshold`.
double fraction_above(std::span<const double> fidelities, double threshold = 0.999);

/// Fidelity reached from each state when the Lyapunov coefficients are the
/// model's prediction (floored to stay positive). Uses every control of the
/// system.
/// Final fidelity for each state evolved with the free coefficients in the
/// matching row of `coeffs`, all controls on.
std::vector<double> coefficient_fidelities(const ControlledSystem& system, std::span<const InitialStateParams> states,
                                           const RowMatrix& coeffs, unsigned threads = 1);

std::vector<double> grnn_control_fidelities(const GrnnModel& model, const ControlledSystem& system,
                                            std::span<const InitialStateParams> states, double sigma,
                                            unsigned threads = 1);

struct SigmaPoint {
  double sigma;
  double epsilon;
  double fraction_high;
};

struct SigmaTuning {
  double best_sigma;
  std::vector<SigmaPoint> curve;
  std::size_t fallbacks = 0;
};

/// Evaluates the averaged log-infidelity of GRNN-designed control on the
/// validation states for each sigma and returns the minimizer (first on
/// ties) with the whole curve.
SigmaTuning grnn_tune_sigma(const GrnnModel& model, std::span<const InitialStateParams> states,
                            const ControlledSystem& system, std::span<const double> grid, unsigned threads = 1);

}  // namespace qlc

#endif  // QLC_GRNN_HPP
