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

// Dense complex linear algebra for small closed quantum systems (n <= ~10).

#ifndef QLC_QUANTUM_HPP
#define QLC_QUANTUM_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qlc {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-9;

/// Square, row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::vector<Complex> row_major);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const Complex> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  bool is_hermitian(double tol = kHermitianTol) const;
  /// Largest elementwise |a - b|.
  double max_abs_diff(const ComplexMatrix& other) const;

  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator*(Complex s, const ComplexMatrix& a);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// Commutator [a, b] = ab - ba.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// A ComplexMatrix checked to be Hermitian at construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m, double tol = kHermitianTol);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.dim(); }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  ComplexMatrix m_;
};

/// Normalized pure state. Construction rejects vectors whose norm is off by
/// more than kNormTol.
class QuantumState {
 public:
  explicit QuantumState(std::vector<Complex> amplitudes);

  /// Rescales to unit norm; rejects the zero vector.
  static QuantumState normalized(std::vector<Complex> amplitudes);
  /// Computational basis vector |k> (0-based).
  static QuantumState basis(std::size_t dim, std::size_t k);

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

 private:
  std::vector<Complex> amps_;
};

/// <a|b>
Complex inner(const QuantumState& a, const QuantumState& b);

/// Eigen-decomposition of a drift Hamiltonian.
///
/// Eigenvalues ascend. Each eigenvector is phase-fixed so that its
/// largest-magnitude component (lowest index on ties) is real and
/// nonnegative. Degenerate eigenvalues are ordered by that component's index.
struct EigenBasis {
  std::vector<double> eigenvalues;
  std::vector<QuantumState> eigenvectors;

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  /// Sum_l E_l |E_l><E_l|
  ComplexMatrix reconstruct() const;
  /// Columns are the eigenvectors.
  ComplexMatrix unitary() const;
};

/// Angles describing a pure state in an eigenbasis up to global phase.
/// theta_i in [0, pi/2], phi_i in [0, 2 pi], n-1 of each.
class InitialStateParams {
 public:
  InitialStateParams(std::vector<double> theta, std::vector<double> phi);

  std::size_t dim() const noexcept { return theta_.size() + 1; }
  std::span<const double> theta() const noexcept { return theta_; }
  std::span<const double> phi() const noexcept { return phi_; }
  /// [theta_1 .. theta_{n-1}, phi_1 .. phi_{n-1}]
  std::vector<double> as_input_vector() const;
  static InitialStateParams from_input_vector(std::span<const double> x);

 private:
  std::vector<double> theta_;
  std::vector<double> phi_;
};

/// Cyclic complex Jacobi rotations. Throws ValidationError for non-Hermitian
/// input and NumericError if the sweeps fail to converge.
EigenBasis eigendecompose(const HermitianOperator& h);

/// Amplitudes c_l on |E_l>:
///   c_n = cos t_{n-1},
///   c_l = e^{i phi_l} cos t_{l-1} prod_{j>=l} sin t_j   (1 < l < n),
///   c_1 = e^{i phi_1} prod_{j>=1} sin t_j.
/// For n = 3 this is sin t2 (sin t1 e^{i p1}|E1> + cos t1 e^{i p2}|E2>) + cos t2 |E3>.
std::vector<Complex> eigen_coefficients(const InitialStateParams& params);

/// sum_l c_l |E_l> in the computational basis.
QuantumState state_from_params(const InitialStateParams& params, const EigenBasis& basis);

/// Inverse of state_from_params (global phase removed via c_n).
InitialStateParams params_from_state(const QuantumState& state, const EigenBasis& basis);

/// |<target|state>|^2
double fidelity(const QuantumState& state, const QuantumState& target);

/// <psi|op|psi>. Throws NumericError if the imaginary part exceeds 1e-8.
double expectation(const QuantumState& state, const HermitianOperator& op);

}  // namespace qlc

#endif  // QLC_QUANTUM_HPP
