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

#include "nimp/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "internal.hpp"

namespace nimp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::not_hermitian: return "not_hermitian";
    case ErrorCode::not_normalized: return "not_normalized";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::incomplete_kraus: return "incomplete_kraus";
    case ErrorCode::parse: return "parse";
    case ErrorCode::schema: return "schema";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

// --- HalfInteger ------------------------------------------------------------

HalfInteger HalfInteger::from_twice(int twice) {
  require(twice >= 0, ErrorCode::invalid_argument,
          "spin quantum number must be non-negative (2s = " + std::to_string(twice) + ")");
  HalfInteger h;
  h.twice_ = twice;
  return h;
}

HalfInteger HalfInteger::from_double(double value) {
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  require(std::isfinite(value) && std::abs(twice - rounded) < 1e-9 && rounded >= 0.0,
          ErrorCode::invalid_argument,
          "spin quantum number must be a non-negative multiple of 1/2, got " +
              std::to_string(value));
  return from_twice(static_cast<int>(rounded));
}

// --- HilbertSpace -----------------------------------------------------------

HilbertSpace::HilbertSpace(std::vector<int> factors) : factors_(std::move(factors)) {
  total_dim_ = 1;
  for (int f : factors_) {
    require(f >= 1, ErrorCode::invalid_argument, "local dimension must be positive");
    total_dim_ *= f;
  }
}

HilbertSpace HilbertSpace::spins(int sites, HalfInteger s) {
  require(sites >= 1, ErrorCode::invalid_argument, "lattice needs at least one site");
  return HilbertSpace(std::vector<int>(static_cast<std::size_t>(sites), s.dim()));
}

int HilbertSpace::factor(int index) const {
  require(index >= 0 && index < num_factors(), ErrorCode::dimension_mismatch,
          "factor index " + std::to_string(index) + " out of range for a space with " +
              std::to_string(num_factors()) + " factors");
  return factors_[static_cast<std::size_t>(index)];
}

HilbertSpace operator*(const HilbertSpace& a, const HilbertSpace& b) {
  std::vector<int> f = a.factors_;
  f.insert(f.end(), b.factors_.begin(), b.factors_.end());
  return HilbertSpace(std::move(f));
}

// --- StateVector ------------------------------------------------------------

StateVector::StateVector(HilbertSpace s, Vector amps, bool is_normalized)
    : space(std::move(s)), amplitudes(std::move(amps)), normalized(is_normalized) {
  require(amplitudes.size() == space.total_dim(), ErrorCode::dimension_mismatch,
          "state has " + std::to_string(amplitudes.size()) + " amplitudes, space dimension is " +
              std::to_string(space.total_dim()));
}

StateVector StateVector::basis(const HilbertSpace& space, Eigen::Index index) {
  require(index >= 0 && index < space.total_dim(), ErrorCode::dimension_mismatch,
          "basis index out of range");
  Vector v = Vector::Zero(space.total_dim());
  v(index) = 1.0;
  return StateVector(space, std::move(v));
}

StateVector StateVector::normalized_copy() const {
  const double n = norm();
  require(n > 0.0, ErrorCode::not_normalized, "cannot normalize a zero state");
  return StateVector(space, amplitudes / n, true);
}

StateVector kron(const StateVector& a, const StateVector& b) {
  Vector v(a.amplitudes.size() * b.amplitudes.size());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i) {
    v.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes(i) * b.amplitudes;
  }
  return StateVector(a.space * b.space, std::move(v), a.normalized && b.normalized);
}

// --- Operator ---------------------------------------------------------------

namespace {

std::vector<int> all_factors(const HilbertSpace& space) {
  std::vector<int> s(static_cast<std::size_t>(space.num_factors()));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

std::vector<int> support_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
  require(a == b, ErrorCode::dimension_mismatch, std::string(what) + ": operands live on different spaces");
}

}  // namespace

Operator::Operator(HilbertSpace space, Matrix matrix, std::vector<int> support)
    : space_(std::move(space)), matrix_(std::move(matrix)), support_(std::move(support)) {
  require(matrix_.rows() == space_.total_dim() && matrix_.cols() == space_.total_dim(),
          ErrorCode::dimension_mismatch,
          "operator matrix is " + std::to_string(matrix_.rows()) + "x" +
              std::to_string(matrix_.cols()) + ", space dimension is " +
              std::to_string(space_.total_dim()));
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
  for (int s : support_) {
    require(s >= 0 && s < space_.num_factors(), ErrorCode::dimension_mismatch,
            "support index out of range");
  }
}

Operator::Operator(HilbertSpace space, Matrix matrix)
    : Operator(space, std::move(matrix), all_factors(space)) {}

Operator Operator::identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()), {});
}

Operator Operator::zero(const HilbertSpace& space) {
  return Operator(space, Matrix::Zero(space.total_dim(), space.total_dim()), {});
}

double Operator::hermiticity_error() const { return max_abs_diff(matrix_, matrix_.adjoint()); }

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint(), support_); }

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "operator sum");
  return Operator(a.space_, a.matrix_ + b.matrix_, support_union(a.support_, b.support_));
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "operator difference");
  return Operator(a.space_, a.matrix_ - b.matrix_, support_union(a.support_, b.support_));
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "operator product");
  return Operator(a.space_, a.matrix_ * b.matrix_, support_union(a.support_, b.support_));
}

Operator operator*(cplx scalar, const Operator& a) {
  return Operator(a.space_, scalar * a.matrix_, a.support_);
}

StateVector operator*(const Operator& a, const StateVector& v) {
  require_same_space(a.space_, v.space, "operator application");
  return StateVector(v.space, a.matrix_ * v.amplitudes, false);
}

Operator kron(const Operator& a, const Operator& b) {
  std::vector<int> support = a.support();
  for (int s : b.support()) support.push_back(s + a.space().num_factors());
  return Operator(a.space() * b.space(), detail::kron(a.matrix(), b.matrix()), std::move(support));
}

// --- spin operators ---------------------------------------------------------

double ladder_coefficient(HalfInteger s, double m, int sign) {
  const double sv = s.value();
  const double arg = sv * (sv + 1.0) - m * (m + static_cast<double>(sign));
  return arg > 0.0 ? std::sqrt(arg) : 0.0;
}

Operator spin_operator(HalfInteger s, SpinComponent kind) {
  require(s.twice() >= 1, ErrorCode::invalid_argument, "spin operators need s >= 1/2");
  const int d = s.dim();
  Matrix plus = Matrix::Zero(d, d);
  // S^+ |m> = c_+(s, m) |m+1>; index k holds m = s - k, so |m+1> sits at k-1.
  for (int k = 1; k < d; ++k) plus(k - 1, k) = ladder_coefficient(s, s.m(k), +1);
  const Matrix minus = plus.adjoint();
  const HilbertSpace space({d});
  switch (kind) {
    case SpinComponent::plus: return Operator(space, plus);
    case SpinComponent::minus: return Operator(space, minus);
    case SpinComponent::x: return Operator(space, 0.5 * (plus + minus));
    case SpinComponent::y: return Operator(space, cplx(0.0, -0.5) * (plus - minus));
    case SpinComponent::z: {
      Matrix z = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) z(k, k) = s.m(k);
      return Operator(space, z);
    }
  }
  fail(ErrorCode::invalid_argument, "unknown spin component");
}

// --- embedding --------------------------------------------------------------

Operator embed(const Matrix& local, int site, const HilbertSpace& space) {
  const int d = space.factor(site);
  require(local.rows() == d && local.cols() == d, ErrorCode::dimension_mismatch,
          "local operator dimension " + std::to_string(local.rows()) +
              " does not match factor " + std::to_string(site) + " of dimension " +
              std::to_string(d));
  Eigen::Index left = 1;
  for (int i = 0; i < site; ++i) left *= space.factor(i);
  const Eigen::Index right = space.total_dim() / (left * d);
  Matrix m = detail::kron(detail::kron(Matrix::Identity(left, left), local),
                          Matrix::Identity(right, right));
  return Operator(space, std::move(m), {site});
}

Operator embed(const Operator& local, int site, const HilbertSpace& space) {
  require(local.space().num_factors() == 1, ErrorCode::dimension_mismatch,
          "embed expects a single-factor operator");
  return embed(local.matrix(), site, space);
}

// --- propagators and spectra ------------------------------------------------

Operator hermitian_propagator(const Operator& hamiltonian, double t) {
  detail::require_hermitian(hamiltonian, "propagator generator");
  if (t < 0.0) return hermitian_propagator(hamiltonian, -t).adjoint();
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian.matrix());
  const Eigen::VectorXd& ev = solver.eigenvalues();
  Vector phases(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) phases(k) = std::polar(1.0, -ev(k) * t);
  const Matrix& v = solver.eigenvectors();
  return Operator(hamiltonian.space(), v * phases.asDiagonal() * v.adjoint(), hamiltonian.support());
}

double default_grouping_tol(double max_abs_eigenvalue) {
  return std::max(1e-9 * max_abs_eigenvalue, 1e-12);
}

SpectralDecomposition spectral_decompose(const Operator& op, std::optional<double> grouping_tol) {
  detail::require_hermitian(op, "spectral decomposition");
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix());
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const Matrix& vecs = solver.eigenvectors();
  const Eigen::Index n = ev.size();

  SpectralDecomposition out;
  out.grouping_tol = grouping_tol.value_or(default_grouping_tol(ev.cwiseAbs().maxCoeff()));
  require(out.grouping_tol >= 0.0, ErrorCode::invalid_argument, "grouping tolerance must be >= 0");

  // Eigen sorts ascending; walk from the top and chain nearby eigenvalues.
  Eigen::Index hi = n - 1;
  while (hi >= 0) {
    Eigen::Index lo = hi;
    while (lo > 0 && ev(lo) - ev(lo - 1) <= out.grouping_tol) --lo;
    const Eigen::Index count = hi - lo + 1;
    const Matrix block = vecs.middleCols(lo, count);
    out.eigenvalues.push_back(ev.segment(lo, count).mean());
    out.projectors.emplace_back(op.space(), block * block.adjoint(), op.support());
    out.degeneracies.push_back(count);
    hi = lo - 1;
  }
  return out;
}

double SpectralDecomposition::reconstruction_error(const Operator& original) const {
  Matrix sum = Matrix::Zero(original.dim(), original.dim());
  for (std::size_t o = 0; o < size(); ++o) sum += eigenvalues[o] * projectors[o].matrix();
  return max_abs_diff(sum, original.matrix());
}

cplx expectation(const StateVector& psi, const Operator& op) {
  require(psi.space == op.space(), ErrorCode::dimension_mismatch,
          "expectation: state and operator live on different spaces");
  return psi.amplitudes.dot(op.matrix() * psi.amplitudes);
}

cplx inner(const StateVector& a, const StateVector& b) {
  require(a.space == b.space, ErrorCode::dimension_mismatch,
          "inner product: states live on different spaces");
  return a.amplitudes.dot(b.amplitudes);
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace nimp
