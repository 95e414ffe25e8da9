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

#include "nimp/protocol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "internal.hpp"

namespace nimp {

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

Matrix ancilla_frame(HalfInteger zeta, Axis axis) {
  const int d = zeta.dim();
  if (axis == Axis::z) return Matrix::Identity(d, d);
  // exp(-i (2 pi / 3) n.S) with n = (1,1,1)/sqrt(3) maps S^z -> S^x -> S^y -> S^z.
  const Operator n_dot_s = cplx(1.0 / std::sqrt(3.0)) * (spin_operator(zeta, SpinComponent::x) +
                                                         spin_operator(zeta, SpinComponent::y) +
                                                         spin_operator(zeta, SpinComponent::z));
  const Matrix cyclic = hermitian_propagator(n_dot_s, 2.0 * std::numbers::pi / 3.0).matrix();
  return axis == Axis::x ? cyclic : Matrix(cyclic * cyclic);
}

Operator axis_spin_operator(HalfInteger zeta, Axis axis, SpinComponent kind) {
  const Matrix frame = ancilla_frame(zeta, axis);
  const Operator base = spin_operator(zeta, kind);
  return Operator(base.space(), frame * base.matrix() * frame.adjoint());
}

// --- ancilla preparation ----------------------------------------------------

AncillaSpec AncillaSpec::equal_superposition(HalfInteger zeta, Axis axis) {
  const auto d = static_cast<std::size_t>(zeta.dim());
  return AncillaSpec{zeta, axis, std::vector<double>(d, 1.0 / std::sqrt(static_cast<double>(d))),
                     std::vector<double>(d, 0.0)};
}

void AncillaSpec::validate() const {
  const auto d = static_cast<std::size_t>(zeta.dim());
  require(zeta.twice() >= 1, ErrorCode::invalid_argument, "ancilla spin must be at least 1/2");
  require(magnitudes.size() == d && phases.size() == d, ErrorCode::dimension_mismatch,
          "ancilla coefficients must have 2 zeta + 1 = " + std::to_string(d) + " entries");
  double sum = 0.0;
  for (double r : magnitudes) {
    require(r >= 0.0 && std::isfinite(r), ErrorCode::invalid_argument,
            "ancilla magnitudes must be finite and non-negative");
    sum += r * r;
  }
  for (double t : phases) {
    require(std::isfinite(t), ErrorCode::invalid_argument, "ancilla phases must be finite");
  }
  require(std::abs(sum - 1.0) < 1e-10, ErrorCode::not_normalized,
          "ancilla coefficients must satisfy sum r_m^2 = 1 (got " + std::to_string(sum) + ")");
}

bool AncillaSpec::balanced(double tol) const {
  const std::size_t d = magnitudes.size();
  for (std::size_t k = 0; k < d; ++k) {
    if (std::abs(magnitudes[k] - magnitudes[d - 1 - k]) > tol) return false;
  }
  return true;
}

bool AncillaSpec::is_equal_superposition(double tol) const {
  const double target = 1.0 / std::sqrt(static_cast<double>(zeta.dim()));
  for (std::size_t k = 0; k < magnitudes.size(); ++k) {
    if (std::abs(magnitudes[k] - target) > tol) return false;
    if (std::abs(std::remainder(phases[k] - phases[0], 2.0 * std::numbers::pi)) > tol) return false;
  }
  return true;
}

StateVector ancilla_state(const AncillaSpec& spec) {
  spec.validate();
  Vector coeffs(spec.zeta.dim());
  for (int k = 0; k < spec.zeta.dim(); ++k) {
    coeffs(k) = std::polar(spec.magnitudes[static_cast<std::size_t>(k)],
                           spec.phases[static_cast<std::size_t>(k)]);
  }
  return StateVector(HilbertSpace({spec.zeta.dim()}), ancilla_frame(spec.zeta, spec.axis) * coeffs);
}

// --- coupling ---------------------------------------------------------------

Operator coupling_generator(int variant, HalfInteger zeta, Axis axis) {
  switch (variant) {
    case 1: return axis_spin_operator(zeta, axis, SpinComponent::z);
    case 2: {
      const Operator minus = axis_spin_operator(zeta, axis, SpinComponent::minus);
      const Operator plus = axis_spin_operator(zeta, axis, SpinComponent::plus);
      return cplx(0.0, 0.5) * (minus - plus);
    }
    default:
      fail(ErrorCode::invalid_argument, "coupling variant must be 1 or 2, got " + std::to_string(variant));
  }
}

double coupling_strength(const CouplingSpec& spec, HalfInteger zeta, Axis axis, const Operator& o1) {
  const Operator b = coupling_generator(spec.variant, zeta, axis);
  return std::abs(spec.lambda) * operator_norm(b.matrix()) * operator_norm(o1.matrix());
}

StateVector couple(const StateVector& joint, const Operator& b, const Operator& o1, double lambda,
                   CouplingMode mode) {
  const Eigen::Index da = b.dim();
  const Eigen::Index dt = o1.dim();
  require(joint.amplitudes.size() == da * dt, ErrorCode::dimension_mismatch,
          "coupling: joint state dimension " + std::to_string(joint.amplitudes.size()) +
              " != " + std::to_string(da) + " x " + std::to_string(dt));
  require(std::isfinite(lambda), ErrorCode::invalid_argument, "coupling time must be finite");
  detail::require_hermitian(b, "coupling operator B");
  detail::require_hermitian(o1, "coupled observable O1");

  const Matrix y = detail::as_target_columns(joint.amplitudes, dt);
  if (mode == CouplingMode::linearized) {
    const Matrix out = y - cplx(0.0, lambda) * o1.matrix() * y * b.matrix().transpose();
    return StateVector(joint.space, detail::flatten(out), false);
  }

  // exp(-i lambda B (x) O1) = (Q (x) W) exp(-i lambda beta (x) e) (Q (x) W)^dagger.
  const Eigen::SelfAdjointEigenSolver<Matrix> bs(b.matrix());
  const Eigen::SelfAdjointEigenSolver<Matrix> os(o1.matrix());
  const Matrix& q = bs.eigenvectors();
  const Matrix& w = os.eigenvectors();
  Matrix z = w.adjoint() * y * q.conjugate();
  for (Eigen::Index k = 0; k < da; ++k) {
    for (Eigen::Index j = 0; j < dt; ++j) {
      z(j, k) *= std::polar(1.0, -lambda * bs.eigenvalues()(k) * os.eigenvalues()(j));
    }
  }
  const Matrix out = w * z * q.transpose();
  return StateVector(joint.space, detail::flatten(out), joint.normalized);
}

// --- distributions ----------------------------------------------------------

void NimpRun::validate() const {
  task.validate_ordered();
  ancilla.validate();
  require(coupling.variant == 1 || coupling.variant == 2, ErrorCode::invalid_argument,
          "coupling variant must be 1 or 2");
  require(std::isfinite(coupling.lambda), ErrorCode::invalid_argument, "lambda must be finite");
}

double OutcomeDistribution::total() const {
  return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

OutcomeDistribution outcome_distribution(const NimpRun& run) {
  run.validate();
  const CorrelationTask& task = run.task;
  const HalfInteger zeta = run.ancilla.zeta;
  const Eigen::Index dt = task.psi0.space.total_dim();

  const StateVector psi_t1 = evolve(task.psi0, task.schedule, task.t1);
  const StateVector phi = ancilla_state(run.ancilla);
  const Operator b = coupling_generator(run.coupling.variant, zeta, run.ancilla.axis);
  const StateVector coupled = couple(kron(phi, psi_t1), b, task.o1, run.coupling.lambda, run.coupling.mode);

  const Matrix frame = ancilla_frame(zeta, run.ancilla.axis);
  const Matrix u12 = task.schedule.propagator(task.t1, task.t2).matrix();
  const SpectralDecomposition o2 = spectral_decompose(task.o2);

  Matrix y = detail::as_target_columns(coupled.amplitudes, dt);
  Matrix branches;  // column k: target state paired with ancilla outcome m_k, at t2
  if (run.timing == ReadoutTiming::deferred) {
    y = u12 * y;
    branches = y * frame.conjugate();
  } else {
    branches = u12 * (y * frame.conjugate());
  }

  OutcomeDistribution dist;
  dist.min_raw_probability = std::numeric_limits<double>::infinity();
  for (int k = 0; k < zeta.dim(); ++k) {
    const Vector branch = branches.col(k);
    for (std::size_t o = 0; o < o2.size(); ++o) {
      double p = branch.dot(o2.projectors[o].matrix() * branch).real();
      dist.min_raw_probability = std::min(dist.min_raw_probability, p);
      if (p < 0.0) {
        if (run.coupling.mode == CouplingMode::linearized || p < -1e-12) {
          dist.positivity_violated = true;
        } else {
          p = 0.0;
        }
      }
      dist.labels.push_back({zeta.m(k), o2.eigenvalues[o]});
      dist.probabilities.push_back(p);
    }
  }
  return dist;
}

double weighted_correlation(const OutcomeDistribution& dist) {
  require(dist.labels.size() == dist.probabilities.size(), ErrorCode::dimension_mismatch,
          "distribution labels and probabilities differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.labels.size(); ++i) {
    sum += dist.labels[i][0] * dist.labels[i][1] * dist.probabilities[i];
  }
  return sum;
}

// --- prefactors and reconstruction ------------------------------------------

double f_prefactor(int variant, HalfInteger zeta) {
  require(zeta.twice() >= 1, ErrorCode::invalid_argument, "ancilla spin must be at least 1/2");
  const double s = zeta.value();
  const double d = 2.0 * s + 1.0;
  if (variant == 1) return (2.0 * s * s * s + 3.0 * s * s + s) / (3.0 * d);
  require(variant == 2, ErrorCode::invalid_argument, "coupling variant must be 1 or 2");
  double sum = 0.0;
  for (int k = 1; k < zeta.dim(); ++k) sum += ladder_coefficient(zeta, zeta.m(k), +1);
  return sum / (2.0 * d);
}

cplx ancilla_prefactor(const AncillaSpec& spec, int variant) {
  const StateVector phi = ancilla_state(spec);
  const Operator b = coupling_generator(variant, spec.zeta, spec.axis);
  const Operator s = axis_spin_operator(spec.zeta, spec.axis, SpinComponent::z);
  return expectation(phi, b * s);
}

cplx reconstruct(double weighted1, double weighted2, double lambda, HalfInteger zeta) {
  require(lambda != 0.0, ErrorCode::precondition, "lambda must be nonzero to reconstruct C");
  return -1.0 / (2.0 * lambda) *
         cplx(weighted2 / f_prefactor(2, zeta), weighted1 / f_prefactor(1, zeta));
}

cplx reconstruct_general(double weighted1, double weighted2, double lambda, cplx w1, cplx w2) {
  require(lambda != 0.0, ErrorCode::precondition, "lambda must be nonzero to reconstruct C");
  // W_k / (-2 lambda) = Im(w_k) Re C + Re(w_k) Im C.
  const double a = w1.imag(), b = w1.real(), c = w2.imag(), d = w2.real();
  const double det = a * d - b * c;
  require(std::abs(det) > 1e-14, ErrorCode::precondition,
          "ancilla prefactors do not separate Re C and Im C");
  const double r1 = weighted1 / (-2.0 * lambda);
  const double r2 = weighted2 / (-2.0 * lambda);
  return {(d * r1 - b * r2) / det, (a * r2 - c * r1) / det};
}

ProtocolResult run_protocol(const NimpRun& run) {
  ProtocolResult result;
  result.distribution = outcome_distribution(run);
  result.weighted = weighted_correlation(result.distribution);
  return result;
}

cplx estimate_correlation(const CorrelationTask& task, const AncillaSpec& ancilla, double lambda,
                          CouplingMode mode, ReadoutTiming timing) {
  require(lambda != 0.0, ErrorCode::precondition, "lambda must be nonzero");
  const double w1 = run_protocol({task, ancilla, {1, lambda, mode}, timing}).weighted;
  const double w2 = run_protocol({task, ancilla, {2, lambda, mode}, timing}).weighted;
  if (ancilla.is_equal_superposition()) return reconstruct(w1, w2, lambda, ancilla.zeta);
  return reconstruct_general(w1, w2, lambda, ancilla_prefactor(ancilla, 1), ancilla_prefactor(ancilla, 2));
}

}  // namespace nimp
