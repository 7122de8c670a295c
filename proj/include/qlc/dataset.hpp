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

// Seeded sample generation and labeling for both designs, plus the
// line-oriented sample-set file format.
//
// File layout:
//   # qlc-samples v1
//   # kind=classification|regression
//   # seed=<master seed>
//   # fingerprint=<16 hex digits>
//   # generator=<name version>
//   # inputs=<n_I>
//   # outputs=<n_O>
//   # meta=<n_M>
//   # count=<N>
//   x_1 .. x_nI y_1 .. y_nO m_1 .. m_nM      (one sample per line, %.17g)
//
// Classification: y is one-hot over M candidates plus "others"; meta holds
// the fidelity reached with each candidate. Regression: y holds the free
// Lyapunov coefficients (goal omitted); meta holds the optimized infidelity.

#ifndef QLC_DATASET_HPP
#define QLC_DATASET_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qlc/features.hpp"
#include "qlc/optim.hpp"
#include "qlc/rng.hpp"

namespace qlc {

enum class SampleKind { kClassification, kRegression };

std::string to_string(SampleKind kind);
SampleKind parse_sample_kind(const std::string& text);

struct LabeledSample {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> meta;
};

struct SampleSet {
  SampleKind kind = SampleKind::kClassification;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
  std::string generator;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t meta = 0;
  std::vector<LabeledSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  RowMatrix input_matrix() const;
  RowMatrix target_matrix() const;
  /// First `count` samples (same header).
  SampleSet prefix(std::size_t count) const;
};

/// theta uniform on [0, pi/2], phi uniform on [0, 2 pi]; draws all theta
/// first, then all phi.
InitialStateParams random_params(std::size_t n, Rng& rng);

/// `count` states, state k drawn from substream (seed, stream, k).
std::vector<InitialStateParams> random_param_list(std::size_t n, std::size_t count, std::uint64_t seed,
                                                  std::string_view stream);

struct ClassificationOptions {
  /// Lyapunov coefficients used for every candidate.
  std::vector<double> weights{1.0, 1.0, 0.0};
  double fid_threshold = 0.99;
  /// Top two fidelities within this gap count as "the same" (the dt vs
  /// dt/10 accuracy of the default integration step).
  double tie_eps = 1e-6;
  /// 0 selects the system's default step.
  double dt = 0.0;
};

struct ClassLabel {
  /// 0..M-1 for candidate controls, M for "others".
  std::size_t choice = 0;
  std::vector<double> fidelities;
};

/// Candidates are the system's controls, each used alone. The label is the
/// best candidate unless the top two are within tie_eps or all fall below
/// fid_threshold, in which case it is "others" (index M).
ClassLabel label_classification(const ControlledSystem& system, const InitialStateParams& params,
                                const ClassificationOptions& options = {});
/// Batched form; identical results.
std::vector<ClassLabel> label_classification_batch(const ControlledSystem& system,
                                                   std::span<const InitialStateParams> params,
                                                   const ClassificationOptions& options = {});

/// The decision rule alone, applied to candidate fidelities.
std::size_t choose_label(std::span<const double> fidelities, const ClassificationOptions& options);

struct RegressionOptions {
  BoxBounds bounds{{0.0, 0.0}, {10.0, 20.0}};
  int restarts = 8;
  NelderMeadOptions search{};
};

WeightOptimum label_regression(const ControlledSystem& system, const InitialStateParams& params,
                               const RegressionOptions& options, std::uint64_t seed);

struct GenerateOptions {
  ClassificationOptions classification{};
  RegressionOptions regression{};
  unsigned threads = 1;
  /// Called with (done, total) from the calling thread.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Sample k uses state substream (seed, "state", k) and, for regression,
/// optimizer seed derive(seed, "label", k); results do not depend on
/// `threads`.
SampleSet generate_set(SampleKind kind, const ControlledSystem& system, std::size_t count, std::uint64_t seed,
                       const GenerateOptions& options = {});

/// Hash of the system (H0, controls, K, T, goal) and the labeling setup
/// that determine a set's labels.
std::uint64_t fingerprint(SampleKind kind, const ControlledSystem& system, const GenerateOptions& options);

/// Disjoint seeded shuffle split: the first round(f_train N) shuffled samples
/// train, the next round(f_test N) test.
std::pair<SampleSet, SampleSet> split(const SampleSet& set, double train_fraction, double test_fraction,
                                      std::uint64_t seed);

void store(std::ostream& out, const SampleSet& set);
std::string store(const SampleSet& set);
/// Throws ParseError (with line) on malformed text. If `expected` is given
/// and differs from the file's fingerprint, throws ValidationError unless
/// `allow_mismatch`, in which case it only warns.
SampleSet load(std::istream& in, std::optional<std::uint64_t> expected = std::nullopt, bool allow_mismatch = false);

}  // namespace qlc

#endif  // QLC_DATASET_HPP
