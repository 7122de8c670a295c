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

#include "qlc/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qlc/error.hpp"

namespace qlc {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (data_.size() != dim * dim) {
    throw ValidationError("ComplexMatrix: expected " + std::to_string(dim * dim) +
                          " entries, got " + std::to_string(data_.size()));
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
  require_same_dim(dim_, other.dim_, "max_abs_diff");
  double d = 0.0;
  for (std::size_t k = 0; k < data_.size(); ++k) d = std::max(d, std::abs(data_[k] - other.data_[k]));
  return d;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim_, b.dim_, "matrix +");
  ComplexMatrix r(a.dim_);
  for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] + b.data_[k];
  return r;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim_, b.dim_, "matrix -");
  ComplexMatrix r(a.dim_);
  for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] - b.data_[k];
  return r;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim_, b.dim_, "matrix *");
  const std::size_t n = a.dim_;
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix r(a.dim_);
  for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = s * a.data_[k];
  return r;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

HermitianOperator::HermitianOperator(ComplexMatrix m, double tol) : m_(std::move(m)) {
  if (m_.dim() == 0) throw ValidationError("HermitianOperator: empty matrix");
  if (!m_.is_hermitian(tol)) throw ValidationError("HermitianOperator: matrix is not Hermitian");
}

QuantumState::QuantumState(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.empty()) throw ValidationError("QuantumState: empty amplitude vector");
  double norm2 = 0.0;
  for (const auto& a : amps_) norm2 += std::norm(a);
  if (!(std::abs(norm2 - 1.0) <= kNormTol)) {
    throw ValidationError("QuantumState: norm^2 = " + std::to_string(norm2) + " is not 1");
  }
}

QuantumState QuantumState::normalized(std::vector<Complex> amplitudes) {
  double norm2 = 0.0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw ValidationError("QuantumState::normalized: zero or non-finite vector");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& a : amplitudes) a *= inv;
  return QuantumState(std::move(amplitudes));
}

QuantumState QuantumState::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) throw ValidationError("QuantumState::basis: index out of range");
  std::vector<Complex> a(dim);
  a[k] = 1.0;
  return QuantumState(std::move(a));
}

Complex inner(const QuantumState& a, const QuantumState& b) {
  require_same_dim(a.dim(), b.dim(), "inner");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

ComplexMatrix EigenBasis::reconstruct() const {
  const std::size_t n = dim();
  ComplexMatrix m(n);
  for (std::size_t l = 0; l < n; ++l) {
    const auto& v = eigenvectors[l];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) += eigenvalues[l] * v[i] * std::conj(v[j]);
  }
  return m;
}

ComplexMatrix EigenBasis::unitary() const {
  const std::size_t n = dim();
  ComplexMatrix u(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i) u(i, l) = eigenvectors[l][i];
  return u;
}

InitialStateParams::InitialStateParams(std::vector<double> theta, std::vector<double> phi)
    : theta_(std::move(theta)), phi_(std::move(phi)) {
  if (theta_.empty() || theta_.size() != phi_.size()) {
    throw ValidationError("InitialStateParams: need n-1 >= 1 theta and phi values each");
  }
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (double t : theta_)
    if (!(t >= 0.0 && t <= kHalfPi)) throw ValidationError("InitialStateParams: theta outside [0, pi/2]");
  for (double p : phi_)
    if (!(p >= 0.0 && p <= kTwoPi)) throw ValidationError("InitialStateParams: phi outside [0, 2pi]");
}

std::vector<double> InitialStateParams::as_input_vector() const {
  std::vector<double> x(theta_);
  x.insert(x.end(), phi_.begin(), phi_.end());
  return x;
}

InitialStateParams InitialStateParams::from_input_vector(std::span<const double> x) {
  if (x.size() < 2 || x.size() % 2 != 0) {
    throw ValidationError("InitialStateParams: input vector must have even length >= 2");
  }
  const std::size_t h = x.size() / 2;
  return InitialStateParams({x.begin(), x.begin() + h}, {x.begin() + h, x.end()});
}

EigenBasis eigendecompose(const HermitianOperator& h) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h.matrix();
  ComplexMatrix v = ComplexMatrix::identity(n);

  double scale = 0.0;
  for (const auto& x : a.data()) scale += std::norm(x);
  scale = std::sqrt(scale);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        if (p != q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 60;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const Complex ph = apq / mag;
        // Remove the phase of a_pq, then a real symmetric rotation.
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex jpp = c, jpq = s, jqp = -s * std::conj(ph), jqq = c * std::conj(ph);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (sweep == kMaxSweeps) throw NumericError("eigendecompose: Jacobi sweeps did not converge");

  struct Pair {
    double value;
    std::size_t lead;
    std::vector<Complex> vec;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n);
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<Complex> vec(n);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vec[i] = v(i, l);
      norm2 += std::norm(vec[i]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    double biggest = 0.0;
    for (auto& x : vec) {
      x *= inv;
      biggest = std::max(biggest, std::abs(x));
    }
    std::size_t lead = 0;
    while (std::abs(vec[lead]) < biggest - 1e-12) ++lead;
    const Complex fix = std::conj(vec[lead]) / std::abs(vec[lead]);
    for (auto& x : vec) x *= fix;
    vec[lead] = std::abs(vec[lead]);
    pairs.push_back({a(l, l).real(), lead, std::move(vec)});
  }

  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.value < y.value; });
  double emax = 1.0;
  for (const auto& p : pairs) emax = std::max(emax, std::abs(p.value));
  const double tie = 1e-10 * emax;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && pairs[end].value - pairs[end - 1].value <= tie) ++end;
    std::stable_sort(pairs.begin() + static_cast<std::ptrdiff_t>(start),
                     pairs.begin() + static_cast<std::ptrdiff_t>(end),
                     [](const Pair& x, const Pair& y) { return x.lead < y.lead; });
    start = end;
  }

  EigenBasis basis;
  for (auto& p : pairs) {
    basis.eigenvalues.push_back(p.value);
    basis.eigenvectors.emplace_back(std::move(p.vec));
  }
  return basis;
}

std::vector<Complex> eigen_coefficients(const InitialStateParams& params) {
  const std::size_t n = params.dim();
  const auto theta = params.theta();
  const auto phi = params.phi();
  std::vector<Complex> c(n);
  // running = prod_{j >= l} sin(theta_j), built from the top level down.
  double running = 1.0;
  for (std::size_t l = n; l-- > 0;) {
    double mag = running;
    if (l > 0) mag *= std::cos(theta[l - 1]);
    c[l] = l + 1 == n ? Complex(mag) : std::polar(mag, phi[l]);
    if (l > 0) running *= std::sin(theta[l - 1]);
  }
  return c;
}

QuantumState state_from_params(const InitialStateParams& params, const EigenBasis& basis) {
  require_same_dim(params.dim(), basis.dim(), "state_from_params");
  const std::size_t n = basis.dim();
  const auto c = eigen_coefficients(params);
  std::vector<Complex> amps(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i) amps[i] += c[l] * basis.eigenvectors[l][i];
  return QuantumState::normalized(std::move(amps));
}

InitialStateParams params_from_state(const QuantumState& state, const EigenBasis& basis) {
  require_same_dim(state.dim(), basis.dim(), "params_from_state");
  const std::size_t n = basis.dim();
  if (n < 2) throw ValidationError("params_from_state: dimension must be >= 2");
  std::vector<Complex> c(n);
  for (std::size_t l = 0; l < n; ++l) c[l] = inner(basis.eigenvectors[l], state);
  if (std::abs(c[n - 1]) > 0.0) {
    const Complex fix = std::conj(c[n - 1]) / std::abs(c[n - 1]);
    for (auto& x : c) x *= fix;
  }
  std::vector<double> theta(n - 1), phi(n - 1);
  double below = 0.0;  // sum_{j < l} |c_j|^2
  for (std::size_t l = 1; l < n; ++l) {
    below += std::norm(c[l - 1]);
    theta[l - 1] = std::atan2(std::sqrt(below), std::abs(c[l]));
  }
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    double p = std::arg(c[l]);
    if (p < 0.0) p += kTwoPi;
    phi[l] = std::clamp(p, 0.0, kTwoPi);
  }
  return InitialStateParams(std::move(theta), std::move(phi));
}

double fidelity(const QuantumState& state, const QuantumState& target) {
  return std::min(1.0, std::norm(inner(target, state)));
}

double expectation(const QuantumState& state, const HermitianOperator& op) {
  require_same_dim(state.dim(), op.dim(), "expectation");
  const std::size_t n = state.dim();
  Complex s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += op(i, j) * state[j];
    s += std::conj(state[i]) * row;
  }
  if (std::abs(s.imag()) > 1e-8) {
    throw NumericError("expectation: imaginary part " + std::to_string(s.imag()) + " exceeds 1e-8");
  }
  return s.real();
}

}  // namespace qlc
