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

// Dense sample matrices and the [-1, 1] input scaling shared by the MLP and
// the GRNN.

#ifndef QLC_FEATURES_HPP
#define QLC_FEATURES_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace qlc {

/// rows x cols, row-major.
struct RowMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RowMatrix() = default;
  RowMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  void append(std::span<const double> values);
};

/// x'_j = 2 (x_j - min_j) / (max_j - min_j) - 1 with training-set extrema.
/// Inputs outside [min, max] extrapolate linearly. A constant column maps
/// to 0.
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(std::vector<double> min, std::vector<double> max);

  /// Needs >= 2 rows. Warns once per constant column.
  static Normalizer fit(const RowMatrix& x);

  std::size_t dim() const noexcept { return min_.size(); }
  std::span<const double> min() const noexcept { return min_; }
  std::span<const double> max() const noexcept { return max_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;
  RowMatrix apply(const RowMatrix& x) const;

 private:
  std::vector<double> min_;
  std::vector<double> max_;
};

}  // namespace qlc

#endif  // QLC_FEATURES_HPP
