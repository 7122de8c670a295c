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

// Feedforward network with logistic units on every layer (output included),
// trained by full-batch gradient descent with momentum and an adaptive
// learning rate.

#ifndef QLC_MLP_HPP
#define QLC_MLP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qlc/features.hpp"

namespace qlc {

/// 1 / (1 + e^{-x})
double sigmoid(double x);

class MlpNetwork {
 public:
  /// All-zero parameters for the given sizes (n0 inputs, then one entry per
  /// neuron layer).
  explicit MlpNetwork(std::vector<std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t layers() const noexcept { return sizes_.size() - 1; }
  std::size_t inputs() const noexcept { return sizes_.front(); }
  std::size_t outputs() const noexcept { return sizes_.back(); }

  /// w^l, n_{l-1} x n_l row-major: weight(l)[i * n_l + j] links input i to
  /// neuron j. l is 0-based over neuron layers.
  std::span<double> weight(std::size_t l) { return weights_.at(l); }
  std::span<const double> weight(std::size_t l) const { return weights_.at(l); }
  std::span<double> bias(std::size_t l) { return biases_.at(l); }
  std::span<const double> bias(std::size_t l) const { return biases_.at(l); }

  std::size_t parameter_count() const noexcept;
  /// Layer by layer: weights then biases.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

/// Weights uniform in [-0.5, 0.5], biases zero.
MlpNetwork mlp_init(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

/// Output for one already-normalized input.
std::vector<double> mlp_forward(const MlpNetwork& net, std::span<const double> x);
/// One output row per already-normalized input row.
RowMatrix mlp_forward(const MlpNetwork& net, const RowMatrix& x);

/// (1/N) sum_k |Y'_k - Y_k|^2 with Y'_k the output for normalize(X_k).
double mse(const MlpNetwork& net, const RowMatrix& x, const RowMatrix& y, const Normalizer& normalizer);

/// Gradient of the MSE over already-normalized inputs, laid out like
/// parameters().
std::vector<double> mse_gradient(const MlpNetwork& net, const RowMatrix& x_normalized, const RowMatrix& y);

/// Index of the largest output; lowest index on ties.
std::size_t argmax(std::span<const double> v);
std::size_t classify(const MlpNetwork& net, std::span<const double> x, const Normalizer& normalizer);

/// Fraction of rows whose predicted class equals argmax of the target row.
double success_rate(const MlpNetwork& net, const RowMatrix& x, const RowMatrix& y, const Normalizer& normalizer);

struct TrainConfig {
  double lr0 = 0.01;
  double momentum = 0.9;
  double lr_up = 1.05;
  double lr_down = 0.7;
  /// Relative training-MSE rise above which a rejected step also cuts lr.
  double max_rise = 0.04;
  double lr_max = 10.0;
  int max_iters = 10000;
  int eval_every = 10;

  void validate() const;
};

struct TrainRecord {
  int iteration;
  double train_mse;
  double test_mse;
  double train_rate;
  double test_rate;
  double lr;
};

struct TrainHistory {
  std::vector<TrainRecord> records;
  /// Network with the lowest test-set MSE among the evaluated iterations.
  MlpNetwork best;
  int best_iteration = 0;
  double best_test_mse = 0.0;
  int accepted_steps = 0;
  int rejected_steps = 0;
  /// Training MSE after each accepted step.
  std::vector<double> accepted_mse;
};

/// Full-batch training. Each iteration proposes
///   v <- momentum * v - lr * grad,  params <- params + v
/// and keeps it only if the training MSE strictly decreases (then lr grows
/// by lr_up, capped at lr_max). Otherwise the parameters are restored and v
/// is zeroed; lr shrinks by lr_down if the MSE rose by more than max_rise
/// or the rejected step carried no momentum. The normalizer must come from
/// the training inputs.
TrainHistory mlp_train(MlpNetwork net, const RowMatrix& train_x, const RowMatrix& train_y, const RowMatrix& test_x,
                       const RowMatrix& test_y, const Normalizer& normalizer, const TrainConfig& cfg);

/// Versioned JSON document with layer sizes, row-major weights, biases and
/// the normalizer.
std::string mlp_to_json(const MlpNetwork& net, const Normalizer& normalizer);
std::pair<MlpNetwork, Normalizer> mlp_from_json(const std::string& text);

}  // namespace qlc

#endif  // QLC_MLP_HPP
