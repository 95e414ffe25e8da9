// Copyright 2026 The nimp Authors
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

// Dense linear algebra for finite spin systems.
//
// Conventions used throughout the library:
//   * hbar = 1;
//   * the local basis of a spin-s factor is ordered by descending magnetic
//     quantum number, m = s, s-1, ..., -s;
//   * tensor factors are ordered [ancilla(s)..., target sites...] and the
//     flattened index is row-major (the last factor varies fastest).

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nimp/error.hpp"

namespace nimp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-12;

/// Spin quantum number stored as 2s so that half-integers are exact.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;

  static HalfInteger from_twice(int twice);
  /// Accepts values within 1e-9 of a non-negative multiple of 1/2.
  static HalfInteger from_double(double value);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr int dim() const noexcept { return twice_ + 1; }
  /// Magnetic quantum number of the k-th basis state (k = 0 is m = s).
  constexpr double m(int k) const noexcept { return value() - k; }

  friend constexpr bool operator==(HalfInteger, HalfInteger) = default;

 private:
  int twice_ = 1;
};

/// Ordered tensor product of local factors.
class HilbertSpace {
 public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<int> factors);

  static HilbertSpace spins(int sites, HalfInteger s);

  const std::vector<int>& factors() const noexcept { return factors_; }
  int num_factors() const noexcept { return static_cast<int>(factors_.size()); }
  int factor(int index) const;
  Eigen::Index total_dim() const noexcept { return total_dim_; }

  /// Concatenation `a (x) b`.
  friend HilbertSpace operator*(const HilbertSpace& a, const HilbertSpace& b);
  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  std::vector<int> factors_;
  Eigen::Index total_dim_ = 1;
};

struct StateVector {
  HilbertSpace space;
  Vector amplitudes;
  /// False for un-normalized branches (linearized coupling, Kraus images).
  bool normalized = true;

  StateVector() = default;
  StateVector(HilbertSpace space, Vector amplitudes, bool normalized = true);

  static StateVector basis(const HilbertSpace& space, Eigen::Index index);

  double norm() const { return amplitudes.norm(); }
  /// Returns a unit-norm copy; throws if the norm vanishes.
  StateVector normalized_copy() const;
};

/// `a (x) b` on the concatenated space.
StateVector kron(const StateVector& a, const StateVector& b);

class Operator {
 public:
  Operator() = default;
  Operator(HilbertSpace space, Matrix matrix, std::vector<int> support);
  /// Support defaults to every factor.
  Operator(HilbertSpace space, Matrix matrix);

  static Operator identity(const HilbertSpace& space);
  static Operator zero(const HilbertSpace& space);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  const std::vector<int>& support() const noexcept { return support_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  /// max |A - A^dagger|.
  double hermiticity_error() const;
  bool is_hermitian(double tol = kHermitianTol) const { return hermiticity_error() < tol; }

  Operator adjoint() const;

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(cplx scalar, const Operator& a);
  friend StateVector operator*(const Operator& a, const StateVector& v);

 private:
  HilbertSpace space_;
  Matrix matrix_;
  std::vector<int> support_;
};

/// `a (x) b`; the supports of `b` are shifted past the factors of `a`.
Operator kron(const Operator& a, const Operator& b);

enum class SpinComponent { x, y, z, plus, minus };

/// Spin-s matrices in the descending-m S^z eigenbasis.
Operator spin_operator(HalfInteger s, SpinComponent kind);

/// Ladder coefficient sqrt(s(s+1) - m(m +/- 1)).
double ladder_coefficient(HalfInteger s, double m, int sign);

/// Lifts a single-factor operator to `space`, acting as identity elsewhere.
Operator embed(const Operator& local, int site, const HilbertSpace& space);
Operator embed(const Matrix& local, int site, const HilbertSpace& space);

/// exp(-i H t) from the eigendecomposition of H.
Operator hermitian_propagator(const Operator& hamiltonian, double t);

struct SpectralDecomposition {
  /// Distinct eigenvalues, sorted in descending order.
  std::vector<double> eigenvalues;
  std::vector<Operator> projectors;
  std::vector<Eigen::Index> degeneracies;
  double grouping_tol = 0.0;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  /// max |sum_o e_o Pi^o - O|.
  double reconstruction_error(const Operator& original) const;
};

/// Default grouping tolerance: 1e-9 * max|eigenvalue| with a 1e-12 floor.
double default_grouping_tol(double max_abs_eigenvalue);

SpectralDecomposition spectral_decompose(const Operator& op,
                                         std::optional<double> grouping_tol = std::nullopt);

/// <psi|O|psi>.
cplx expectation(const StateVector& psi, const Operator& op);

/// <a|b>.
cplx inner(const StateVector& a, const StateVector& b);

/// Largest singular value of a dense matrix.
double operator_norm(const Matrix& m);

/// max_ij |a_ij - b_ij|.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace nimp
