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

#include "nimp/povm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "internal.hpp"

namespace nimp {

double KrausSet::completeness_residual() const {
  const Eigen::Index d = space.total_dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& m : operators) sum += m.adjoint() * m;
  return max_abs_diff(sum, Matrix::Identity(d, d));
}

KrausSet kraus_set(const Operator& b, const StateVector& phi, double lambda, const Operator& o1,
                   const Matrix& basis, const std::vector<double>& labels) {
  detail::require_hermitian(b, "coupling operator B");
  require(phi.amplitudes.size() == b.dim(), ErrorCode::dimension_mismatch,
          "ancilla state does not match B");
  require(std::abs(phi.norm() - 1.0) < 1e-12, ErrorCode::not_normalized, "ancilla state must be normalized");
  require(basis.rows() == b.dim() && static_cast<std::size_t>(basis.cols()) == labels.size(),
          ErrorCode::dimension_mismatch, "measurement basis does not match the ancilla space");

  // M_m = sum_w <m| exp(-i lambda e_w B) |phi> Pi^w.
  const SpectralDecomposition o1_spec = spectral_decompose(o1);
  KrausSet ks;
  ks.labels = labels;
  ks.space = o1.space();
  ks.operators.assign(labels.size(), Matrix::Zero(o1.dim(), o1.dim()));
  for (std::size_t w = 0; w < o1_spec.size(); ++w) {
    const Vector rotated = hermitian_propagator(b, lambda * o1_spec.eigenvalues[w]).matrix() * phi.amplitudes;
    const Vector amps = basis.adjoint() * rotated;
    for (std::size_t m = 0; m < labels.size(); ++m) {
      ks.operators[m] += amps(static_cast<Eigen::Index>(m)) * o1_spec.projectors[w].matrix();
    }
  }
  return ks;
}

KrausSet kraus_set(const AncillaSpec& ancilla, int variant, double lambda, const Operator& o1) {
  std::vector<double> labels;
  for (int k = 0; k < ancilla.zeta.dim(); ++k) labels.push_back(ancilla.zeta.m(k));
  return kraus_set(coupling_generator(variant, ancilla.zeta, ancilla.axis), ancilla_state(ancilla), lambda,
                   o1, ancilla_frame(ancilla.zeta, ancilla.axis), labels);
}

KrausSet kraus_closed_form_im(double theta_plus, double theta_minus, double lambda, const Operator& o1) {
  KrausSet ks;
  ks.labels = {0.5, -0.5};
  ks.space = o1.space();
  ks.source = KrausSource::closed_form;
  ks.operators.push_back(std::polar(M_SQRT1_2, theta_plus) * hermitian_propagator(o1, 0.5 * lambda).matrix());
  ks.operators.push_back(std::polar(M_SQRT1_2, theta_minus) * hermitian_propagator(o1, -0.5 * lambda).matrix());
  return ks;
}

KrausSet kraus_closed_form_re(double lambda, const Operator& o1) {
  const SpectralDecomposition spec = spectral_decompose(o1);
  KrausSet ks;
  ks.labels = {0.5, -0.5};
  ks.space = o1.space();
  ks.source = KrausSource::closed_form;
  ks.operators.assign(2, Matrix::Zero(o1.dim(), o1.dim()));
  for (std::size_t w = 0; w < spec.size(); ++w) {
    const double c = std::cos(0.5 * lambda * spec.eigenvalues[w]);
    const double s = std::sin(0.5 * lambda * spec.eigenvalues[w]);
    ks.operators[0] += M_SQRT1_2 * (c - s) * spec.projectors[w].matrix();
    ks.operators[1] += M_SQRT1_2 * (c + s) * spec.projectors[w].matrix();
  }
  return ks;
}

double two_point_spectrum(const Operator& o1, double tol) {
  const SpectralDecomposition spec = spectral_decompose(o1);
  require(spec.size() == 2, ErrorCode::precondition,
          "O1 must have exactly two distinct eigenvalues +-e (found " + std::to_string(spec.size()) + ")");
  const double hi = spec.eigenvalues[0];
  const double lo = spec.eigenvalues[1];
  require(hi > 0.0 && std::abs(hi + lo) <= tol * std::max(1.0, hi), ErrorCode::precondition,
          "O1 spectrum is not symmetric: {" + std::to_string(hi) + ", " + std::to_string(lo) + "}");
  return 0.5 * (hi - lo);
}

KrausSet kraus_re_projective_point(const Operator& o1) {
  const double e = two_point_spectrum(o1);
  const SpectralDecomposition spec = spectral_decompose(o1);
  const Matrix& pi1 = spec.projectors[0].matrix();  // +e
  const Matrix& pi2 = spec.projectors[1].matrix();  // -e
  const double half_angle = 0.5 * (std::numbers::pi / (2.0 * e)) * e;
  const double c = std::cos(half_angle);
  const double s = std::sin(half_angle);
  KrausSet ks;
  ks.labels = {0.5, -0.5};
  ks.space = o1.space();
  ks.source = KrausSource::closed_form;
  ks.operators.push_back(M_SQRT1_2 * ((c - s) * pi1 + (c + s) * pi2));
  ks.operators.push_back(M_SQRT1_2 * ((c + s) * pi1 + (c - s) * pi2));
  return ks;
}

namespace {

void require_complete(const KrausSet& ks, double tol) {
  const double residual = ks.completeness_residual();
  require(residual <= tol, ErrorCode::incomplete_kraus,
          "Kraus operators are not complete (residual " + std::to_string(residual) + ")");
}

}  // namespace

std::vector<MeasurementBranch> apply_measurement(const StateVector& psi, const KrausSet& ks,
                                                 double completeness_tol) {
  require(psi.space == ks.space, ErrorCode::dimension_mismatch, "state and Kraus set live on different spaces");
  require_complete(ks, completeness_tol);
  std::vector<MeasurementBranch> out;
  for (const Matrix& m : ks.operators) {
    const Vector v = m * psi.amplitudes;
    const double n2 = v.squaredNorm();
    MeasurementBranch branch;
    branch.probability = n2;
    branch.post_state = n2 > 0.0 ? StateVector(psi.space, v / std::sqrt(n2))
                                 : StateVector(psi.space, Vector::Zero(v.size()), false);
    out.push_back(std::move(branch));
  }
  return out;
}

std::vector<EnsembleBranch> apply_measurement(const Ensemble& rho, const KrausSet& ks, double completeness_tol) {
  require(rho.weights.size() == rho.states.size() && !rho.states.empty(), ErrorCode::invalid_argument,
          "ensemble needs matching, non-empty weights and states");
  require_complete(ks, completeness_tol);
  std::vector<EnsembleBranch> out(ks.size());
  for (std::size_t i = 0; i < rho.states.size(); ++i) {
    const auto branches = apply_measurement(rho.states[i], ks, completeness_tol);
    for (std::size_t m = 0; m < ks.size(); ++m) {
      const double w = rho.weights[i] * branches[m].probability;
      out[m].probability += w;
      if (w > 0.0) {
        out[m].post.weights.push_back(w);
        out[m].post.states.push_back(branches[m].post_state);
      }
    }
  }
  for (auto& branch : out) {
    for (double& w : branch.post.weights) w /= branch.probability;
  }
  return out;
}

std::vector<Vector> joint_branches(const Operator& b, const StateVector& phi, double lambda, const Operator& o1,
                                   const Matrix& basis, const StateVector& psi) {
  require(psi.space == o1.space(), ErrorCode::dimension_mismatch, "target state does not match O1");
  require(basis.rows() == b.dim(), ErrorCode::dimension_mismatch, "measurement basis does not match B");
  const StateVector joint = couple(kron(phi, psi), b, o1, lambda, CouplingMode::exact);
  const Matrix y = detail::as_target_columns(joint.amplitudes, psi.amplitudes.size());
  std::vector<Vector> out;
  for (Eigen::Index m = 0; m < basis.cols(); ++m) out.push_back(y * basis.col(m).conjugate());
  return out;
}

double povm_equivalence_residual(const KrausSet& ks, const std::vector<Vector>& branches, const StateVector& psi) {
  require(branches.size() == ks.size(), ErrorCode::dimension_mismatch, "branch count differs from Kraus count");
  const auto measured = apply_measurement(psi, ks);
  double residual = 0.0;
  for (std::size_t m = 0; m < ks.size(); ++m) {
    const double p = branches[m].squaredNorm();
    residual = std::max(residual, std::abs(p - measured[m].probability));
    // Compare sqrt(p) * post-state with the raw branch so that rare outcomes
    // do not amplify rounding through the renormalization.
    const Vector rebuilt = std::sqrt(measured[m].probability) * measured[m].post_state.amplitudes;
    residual = std::max(residual, (rebuilt - branches[m]).cwiseAbs().maxCoeff());
  }
  return residual;
}

// --- ancilla-free protocols -------------------------------------------------

double ancilla_free_im(const CorrelationTask& task, double theta) {
  task.validate_ordered();
  require(std::isfinite(theta) && std::abs(std::sin(theta)) > 1e-300, ErrorCode::precondition,
          "rotation angle theta must be nonzero (and not a multiple of pi)");
  const StateVector psi1 = evolve(task.psi0, task.schedule, task.t1);
  auto rotated_expectation = [&](double angle) {
    const StateVector r = hermitian_propagator(task.o1, angle) * psi1;
    return expectation(propagate(r, task.schedule, task.t1, task.t2), task.o2).real();
  };
  return (rotated_expectation(-theta) - rotated_expectation(theta)) / (4.0 * std::sin(theta));
}

OutcomeDistribution projective_pair_distribution(const CorrelationTask& task) {
  task.validate_ordered();
  const SpectralDecomposition first = spectral_decompose(task.o1);
  const SpectralDecomposition second = spectral_decompose(task.o2);
  const StateVector psi1 = evolve(task.psi0, task.schedule, task.t1);
  const Matrix u12 = task.schedule.propagator(task.t1, task.t2).matrix();
  OutcomeDistribution dist;
  for (std::size_t w = 0; w < first.size(); ++w) {
    const Vector branch = u12 * (first.projectors[w].matrix() * psi1.amplitudes);
    for (std::size_t o = 0; o < second.size(); ++o) {
      dist.labels.push_back({first.eigenvalues[w], second.eigenvalues[o]});
      dist.probabilities.push_back(std::max(0.0, branch.dot(second.projectors[o].matrix() * branch).real()));
    }
  }
  return dist;
}

double ancilla_free_re(const CorrelationTask& task) {
  two_point_spectrum(task.o1);
  return weighted_correlation(projective_pair_distribution(task));
}

ProjectiveTrajectoryModel projective_trajectory_model(const CorrelationTask& task) {
  const OutcomeDistribution joint = projective_pair_distribution(task);
  const SpectralDecomposition first = spectral_decompose(task.o1);
  const SpectralDecomposition second = spectral_decompose(task.o2);
  ProjectiveTrajectoryModel model;
  model.first_labels = first.eigenvalues;
  model.second_labels = second.eigenvalues;
  const StateVector psi1 = evolve(task.psi0, task.schedule, task.t1);
  for (std::size_t w = 0; w < first.size(); ++w) {
    const double pw = std::max(0.0, expectation(psi1, first.projectors[w]).real());
    model.first_probabilities.push_back(pw);
    std::vector<double> cond(second.size(), 0.0);
    for (std::size_t o = 0; o < second.size() && pw > 0.0; ++o) {
      cond[o] = joint.probabilities[w * second.size() + o] / pw;
    }
    model.conditional.push_back(std::move(cond));
  }
  return model;
}

}  // namespace nimp
