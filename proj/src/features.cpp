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

#include "qlc/features.hpp"

#include <cmath>
#include <string>

#include "qlc/error.hpp"

namespace qlc {

void RowMatrix::append(std::span<const double> values) {
  if (rows == 0 && cols == 0) cols = values.size();
  if (values.size() != cols) throw ValidationError("row length " + std::to_string(values.size()) + " != " + std::to_string(cols));
  data.insert(data.end(), values.begin(), values.end());
  ++rows;
}

Normalizer::Normalizer(std::vector<double> min, std::vector<double> max) : min_(std::move(min)), max_(std::move(max)) {
  if (min_.size() != max_.size()) throw ValidationError("normalizer min/max lengths differ");
  for (std::size_t j = 0; j < min_.size(); ++j)
    if (!std::isfinite(min_[j]) || !std::isfinite(max_[j]) || max_[j] < min_[j])
      throw ValidationError("normalizer column " + std::to_string(j) + " has invalid extrema");
}

Normalizer Normalizer::fit(const RowMatrix& x) {
  if (x.rows < 2) throw ValidationError("normalizer needs at least 2 samples");
  std::vector<double> lo(x.row(0).begin(), x.row(0).end());
  std::vector<double> hi = lo;
  for (std::size_t i = 1; i < x.rows; ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) {
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
  }
  for (std::size_t j = 0; j < x.cols; ++j)
    if (lo[j] == hi[j]) warn("input column " + std::to_string(j) + " is constant; it is mapped to 0");
  return Normalizer(std::move(lo), std::move(hi));
}

void Normalizer::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim() || out.size() != dim())
    throw ValidationError("normalizer expects " + std::to_string(dim()) + " inputs, got " + std::to_string(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double span = max_[j] - min_[j];
    out[j] = span > 0.0 ? 2.0 * (x[j] - min_[j]) / span - 1.0 : 0.0;
  }
}

std::vector<double> Normalizer::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  apply(x, out);
  return out;
}

RowMatrix Normalizer::apply(const RowMatrix& x) const {
  RowMatrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) apply(x.row(i), out.row(i));
  return out;
}

}  // namespace qlc
