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

// Shared test utilities: seeded generators for random Hermitian matrices and
// states, and an independent reference route (Pade matrix exponential,
// hand-assembled Pauli Hamiltonians) that never calls into the library's
// propagators or Hamiltonian builders.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "nimp/core.hpp"
#include "nimp/lattice.hpp"

namespace testutil {

using nimp::cplx;
using nimp::Matrix;
using nimp::Vector;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  Matrix hermitian(Eigen::Index d, double scale = 1.0) {
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(normal(), normal());
    }
    return 0.5 * scale * (a + a.adjoint());
  }

  Vector state(Eigen::Index d) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = cplx(normal(), normal());
    return v.normalized();
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// exp(-i t H) by scaling and squaring (Pade), independent of the library's
/// eigendecomposition route.
inline Matrix expm(const Matrix& h, double t) {
  const Matrix a = cplx(0.0, -t) * h;
  return a.exp();
}

inline Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline Matrix pauli(char which) {
  Matrix m = Matrix::Zero(2, 2);
  if (which == 'x') {
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
  } else if (which == 'y') {
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
  } else if (which == 'z') {
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
  } else {
    m = Matrix::Identity(2, 2);
  }
  return m;
}

/// Local 2x2 spin operator placed at `site` of an n-site chain, by explicit Kronecker products.
inline Matrix site_op(const Matrix& local, int site, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, i == site ? local : Matrix::Identity(local.rows(), local.rows()));
  return out;
}

/// Spin-1/2 TFIM H = -J sum S^z S^z - g sum S^x (open chain), assembled from Pauli matrices.
inline Matrix tfim_reference(int n, double j, double g) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(d, d);
  const Matrix sz = 0.5 * pauli('z');
  const Matrix sx = 0.5 * pauli('x');
  for (int i = 0; i + 1 < n; ++i) h -= j * site_op(sz, i, n) * site_op(sz, i + 1, n);
  for (int i = 0; i < n; ++i) h -= g * site_op(sx, i, n);
  return h;
}

/// <psi| U^dag(t1) O1 U(t1) U^dag(t2) O2 U(t2) |psi> with Pade propagators.
inline cplx reference_correlation(const Matrix& h, const Vector& psi, const Matrix& o1, double t1, const Matrix& o2,
                                  double t2) {
  const Matrix u1 = expm(h, t1);
  const Matrix u2 = expm(h, t2);
  const Vector right = u1 * (u2.adjoint() * (o2 * (u2 * psi)));
  const Vector left = o1 * (u1 * psi);
  return left.dot(right);
}

inline nimp::CorrelationTask make_task(const Matrix& h, const Vector& psi, const Matrix& o1, double t1,
                                       const Matrix& o2, double t2, const nimp::HilbertSpace& space) {
  std::vector<int> all(static_cast<std::size_t>(space.num_factors()));
  for (int i = 0; i < space.num_factors(); ++i) all[static_cast<std::size_t>(i)] = i;
  return nimp::CorrelationTask{nimp::StateVector(space, psi),
                               nimp::Operator(space, o1, all),
                               t1,
                               nimp::Operator(space, o2, all),
                               t2,
                               nimp::Schedule::constant(nimp::Operator(space, h, all))};
}

/// The standard 3-site TFIM task: O1 on site 0, O2 on site 2, t1 = 0.3, t2 = 0.7.
/// The default state is the tilted product state (theta = pi/3, phi = pi/5
/// on every site), which gives Im C well away from zero.
inline Vector tilted_state(int n, double theta = M_PI / 3.0, double phi = M_PI / 5.0) {
  Vector local(2);
  local << std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi);
  Vector psi = Vector::Ones(1);
  for (int i = 0; i < n; ++i) psi = kron(psi, local);
  return psi;
}

inline Matrix magnetization_z(int n) {
  Matrix m = Matrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int i = 0; i < n; ++i) m += site_op(0.5 * pauli('z'), i, n);
  return m / static_cast<double>(n);
}

inline nimp::CorrelationTask tfim3_task(const Matrix& o1, const Matrix& o2, const Vector& psi, double t1 = 0.3,
                                        double t2 = 0.7) {
  return make_task(tfim_reference(3, 1.0, 1.0), psi, o1, t1, o2, t2, nimp::HilbertSpace::spins(3, nimp::HalfInteger{}));
}

}  // namespace testutil
