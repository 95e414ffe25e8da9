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

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nimp/lattice.hpp"

using namespace nimp;
using testutil::Rng;

namespace {

const HalfInteger kHalf = HalfInteger::from_twice(1);

// TFIM N=4, J=g=1, S1^z S3^z, t1=0.3, t2=0.7, all-up state; 30-digit mpmath
// evaluation (expm of the 16x16 Hamiltonian), frozen here.
constexpr double kTfim4Re = 0.18478632379705078584;
constexpr double kTfim4Im = 3.8384762320148793091e-11;

CorrelationTask random_task(Rng& rng, int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  const HilbertSpace space = HilbertSpace::spins(n, kHalf);
  return testutil::make_task(rng.hermitian(d), rng.state(d), rng.hermitian(d), rng.uniform(0.0, 2.0),
                             rng.hermitian(d), rng.uniform(0.0, 2.0), space);
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("empty term list gives the zero operator") {
  const HilbertSpace space = HilbertSpace::spins(2, kHalf);
  CHECK(max_abs_diff(build_hamiltonian({}, space).matrix(), Matrix::Zero(4, 4)) == 0.0);
}

TEST_CASE("tfim with g = 0 on two sites is -S1z S2z") {
  const HilbertSpace space = HilbertSpace::spins(2, kHalf);
  const Operator h = build_hamiltonian(tfim_terms(2, 1.0, 0.0, kHalf), space);
  const Matrix sz = 0.5 * testutil::pauli('z');
  CHECK(max_abs_diff(h.matrix(), -testutil::kron(sz, sz)) < 1e-15);
  const SpectralDecomposition sd = spectral_decompose(h);
  REQUIRE(sd.size() == 2);
  CHECK(sd.eigenvalues[0] == doctest::Approx(0.25));
  CHECK(sd.eigenvalues[1] == doctest::Approx(-0.25));
}

TEST_CASE("tfim preset matches the hand-assembled Pauli Hamiltonian") {
  for (int n = 1; n <= 5; ++n) {
    const HilbertSpace space = HilbertSpace::spins(n, kHalf);
    const Operator h = build_hamiltonian(tfim_terms(n, 0.7, 1.3, kHalf), space);
    CHECK(max_abs_diff(h.matrix(), testutil::tfim_reference(n, 0.7, 1.3)) < 1e-14);
  }
}

TEST_CASE("xxz and random term lists are Hermitian") {
  Rng rng(8);
  const HilbertSpace space = HilbertSpace::spins(4, HalfInteger::from_twice(2));
  CHECK(build_hamiltonian(xxz_terms(4, 1.0, 0.5, 0.3, HalfInteger::from_twice(2), true), space).hermiticity_error() <
        1e-12);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<HamiltonianTerm> terms;
    for (int k = 0; k < 5; ++k) {
      const int a = rng.integer(0, 3);
      const int b = (a + rng.integer(1, 3)) % 4;
      terms.push_back({rng.normal(), {{a, rng.hermitian(3)}, {b, rng.hermitian(3)}}});
    }
    CHECK(build_hamiltonian(terms, space).hermiticity_error() < 1e-12);
  }
}

TEST_CASE("malformed terms are rejected") {
  const HilbertSpace space = HilbertSpace::spins(2, kHalf);
  const Matrix sz = 0.5 * testutil::pauli('z');
  CHECK_THROWS_AS(build_hamiltonian({{1.0, {{2, sz}}}}, space), Error);
  CHECK_THROWS_AS(build_hamiltonian({{1.0, {{0, sz}, {0, sz}}}}, space), Error);
  Matrix nh = Matrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(build_hamiltonian({{1.0, {{0, nh}}}}, space), Error);
}

TEST_CASE("evolve examples") {
  Rng rng(2);
  const HilbertSpace one({2});
  const Schedule rabi = Schedule::constant(spin_operator(kHalf, SpinComponent::x));
  const StateVector up = StateVector::basis(one, 0);
  const StateVector back = evolve(up, rabi, 2.0 * M_PI);
  CHECK(std::abs(std::abs(back.amplitudes(0)) - 1.0) < 1e-12);
  CHECK(std::abs(back.amplitudes(1)) < 1e-12);

  const HilbertSpace space = HilbertSpace::spins(3, kHalf);
  const Schedule s = Schedule::constant(Operator(space, rng.hermitian(8)));
  for (int trial = 0; trial < 10; ++trial) {
    const StateVector psi(space, rng.state(8));
    CHECK(max_abs_diff(evolve(psi, s, 0.0).amplitudes, psi.amplitudes) < 1e-15);
    CHECK(std::abs(evolve(psi, s, rng.uniform(0.0, 10.0)).norm() - 1.0) < 1e-11);
  }
  CHECK_THROWS_AS(evolve(up, rabi, -1.0), Error);
}

TEST_CASE("piecewise schedule is the ordered product of segment propagators") {
  Rng rng(12);
  const HilbertSpace space = HilbertSpace::spins(2, kHalf);
  const Matrix h1 = rng.hermitian(4);
  const Matrix h2 = rng.hermitian(4);
  const Matrix h3 = rng.hermitian(4);
  const Schedule s({{0.4, Operator(space, h1)}, {0.5, Operator(space, h2)}, {0.2, Operator(space, h3)}});
  CHECK(s.total_duration() == doctest::Approx(1.1));
  // t = 1.6 runs past the end, so the last segment extends.
  const Matrix expect = testutil::expm(h3, 0.7) * testutil::expm(h2, 0.5) * testutil::expm(h1, 0.4);
  CHECK(max_abs_diff(s.propagator(0.0, 1.6).matrix(), expect) < 1e-11);
  const Matrix mid = testutil::expm(h2, 0.3) * testutil::expm(h1, 0.1);
  CHECK(max_abs_diff(s.propagator(0.3, 0.7).matrix(), mid) < 1e-11);
  CHECK(max_abs_diff(s.propagator(0.7, 0.3).matrix(), mid.adjoint()) < 1e-11);
}

TEST_CASE("exact correlation examples") {
  const HilbertSpace space = HilbertSpace::spins(3, kHalf);
  Rng rng(4);
  const Matrix sz = 0.5 * testutil::pauli('z');
  // |+1/2> on site 1 times a random normalized remainder.
  const Vector psi = testutil::kron(Vector::Unit(2, 0), rng.state(4));
  const CorrelationTask eq = testutil::make_task(rng.hermitian(8), psi, testutil::site_op(sz, 0, 3), 0.0,
                                                 testutil::site_op(sz, 0, 3), 0.0, space);
  CHECK(std::abs(exact_correlation(eq) - 0.25) < 1e-14);

  const HilbertSpace one({2});
  Vector plus_i(2);
  plus_i << 1.0, cplx(0.0, 1.0);
  const CorrelationTask single = testutil::make_task(Matrix::Zero(2, 2), plus_i / std::sqrt(2.0), sz, 0.2,
                                                     0.5 * testutil::pauli('x'), 0.9, one);
  CHECK(std::abs(exact_correlation(single) - cplx(0.0, 0.25)) < 1e-15);
}

TEST_CASE("tfim N=4 oracle value") {
  const HilbertSpace space = HilbertSpace::spins(4, kHalf);
  const Operator h = build_hamiltonian(tfim_terms(4, 1.0, 1.0, kHalf), space);
  const Operator sz = spin_operator(kHalf, SpinComponent::z);
  const CorrelationTask task{StateVector::basis(space, 0), embed(sz, 0, space), 0.3, embed(sz, 2, space), 0.7,
                             Schedule::constant(h)};
  const cplx c = exact_correlation(task);
  CHECK(std::abs(c.real() - kTfim4Re) < 1e-13);
  CHECK(std::abs(c.imag() - kTfim4Im) < 1e-13);
}

TEST_CASE("oracle agrees with the Pade reference on random tasks") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 4);
    const Eigen::Index d = Eigen::Index{1} << n;
    const Matrix h = rng.hermitian(d);
    const Vector psi = rng.state(d);
    const Matrix o1 = rng.hermitian(d);
    const Matrix o2 = rng.hermitian(d);
    const double t1 = rng.uniform(0.0, 2.0);
    const double t2 = rng.uniform(0.0, 2.0);
    const CorrelationTask task = testutil::make_task(h, psi, o1, t1, o2, t2, HilbertSpace::spins(n, kHalf));
    CHECK(std::abs(exact_correlation(task) - testutil::reference_correlation(h, psi, o1, t1, o2, t2)) < 1e-11);
  }
}

TEST_CASE("hermitian swap identity") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    CorrelationTask task = random_task(rng, 3);
    const cplx c = exact_correlation(task);
    std::swap(task.o1, task.o2);
    std::swap(task.t1, task.t2);
    CHECK(std::abs(c - std::conj(exact_correlation(task))) < 1e-12);
  }
}

TEST_CASE("equal-time self correlation is the real second moment") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    CorrelationTask task = random_task(rng, 3);
    task.o2 = task.o1;
    task.t2 = task.t1;
    const cplx c = exact_correlation(task);
    const StateVector psi_t = evolve(task.psi0, task.schedule, task.t1);
    const cplx moment = expectation(psi_t, task.o1 * task.o1);
    CHECK(std::abs(c.imag()) < 1e-12);
    CHECK(std::abs(c - moment) < 1e-12);
  }
}

TEST_CASE("time translation invariance for a constant Hamiltonian") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    CorrelationTask task = random_task(rng, 3);
    const double delta = rng.uniform(0.0, 1.5);
    CorrelationTask shifted = task;
    shifted.psi0 = evolve(task.psi0, task.schedule, delta);
    CorrelationTask later = task;
    later.t1 = task.t1 + delta;
    later.t2 = task.t2 + delta;
    CHECK(std::abs(exact_correlation(shifted) - exact_correlation(later)) < 1e-11);
  }
}

TEST_CASE("heisenberg observable examples") {
  Rng rng(31);
  const HilbertSpace space = HilbertSpace::spins(3, kHalf);
  const Matrix hm = rng.hermitian(8);
  const Schedule s = Schedule::constant(Operator(space, hm));
  const Operator o(space, rng.hermitian(8));
  CHECK(max_abs_diff(heisenberg_observable(o, 0.0, s).matrix(), o.matrix()) < 1e-12);

  // A function of H commutes with H.
  const Operator conserved(space, hm * hm - 2.0 * hm);
  CHECK(max_abs_diff(heisenberg_observable(conserved, 1.7, s).matrix(), conserved.matrix()) < 1e-11);

  const Operator ot = heisenberg_observable(o, 0.8, s);
  CHECK(ot.hermiticity_error() < 1e-12);
  const Eigen::VectorXd ev_in = Eigen::SelfAdjointEigenSolver<Matrix>(o.matrix()).eigenvalues();
  const Eigen::VectorXd ev_out = Eigen::SelfAdjointEigenSolver<Matrix>(ot.matrix()).eigenvalues();
  CHECK((ev_in - ev_out).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("task validation") {
  Rng rng(1);
  CorrelationTask task = random_task(rng, 2);
  task.t1 = 1.0;
  task.t2 = 0.5;
  CHECK_NOTHROW(task.validate());
  CHECK_THROWS_AS(task.validate_ordered(), Error);
  task.t1 = -0.1;
  CHECK_THROWS_AS(task.validate(), Error);
  CorrelationTask wrong = random_task(rng, 2);
  wrong.o2 = Operator(HilbertSpace::spins(3, kHalf), Matrix::Identity(8, 8));
  CHECK_THROWS_AS(exact_correlation(wrong), Error);
}

}  // TEST_SUITE
