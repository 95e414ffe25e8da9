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

// Target-only description of the ancilla measurement: Kraus operators
// M_m = <m| exp(-i lambda B (x) O1) |phi>, their closed forms for a spin-1/2
// ancilla, and the two ancilla-free protocols they motivate.

#pragma once

#include <vector>

#include "nimp/core.hpp"
#include "nimp/lattice.hpp"
#include "nimp/protocol.hpp"

namespace nimp {

enum class KrausSource { derived_from_coupling, closed_form };

struct KrausSet {
  std::vector<double> labels;
  std::vector<Matrix> operators;
  HilbertSpace space;
  KrausSource source = KrausSource::derived_from_coupling;

  std::size_t size() const noexcept { return operators.size(); }
  /// max |sum_m M_m^dagger M_m - 1|.
  double completeness_residual() const;
};

/// `basis` holds the ancilla measurement vectors as columns; `labels` names them.
KrausSet kraus_set(const Operator& b, const StateVector& phi, double lambda, const Operator& o1,
                   const Matrix& basis, const std::vector<double>& labels);

/// Kraus set of a NIMP coupling: measurement in the S^alpha eigenbasis named by `ancilla`.
KrausSet kraus_set(const AncillaSpec& ancilla, int variant, double lambda, const Operator& o1);

/// <+-|phi> exp(-+ i lambda O1 / 2) for phi = (e^{i theta+}|+> + e^{i theta-}|->)/sqrt(2).
KrausSet kraus_closed_form_im(double theta_plus, double theta_minus, double lambda, const Operator& o1);

/// (1/sqrt(2)) sum_w [cos(lambda e_w / 2) -+ sin(lambda e_w / 2)] Pi^w, valid for
/// B = S^y and phi = (|+> + |->)/sqrt(2).
KrausSet kraus_closed_form_re(double lambda, const Operator& o1);

/// O1 = e (Pi^1 - Pi^2) evaluated at lambda = pi / (2 e): M_+ = Pi^2, M_- = Pi^1.
KrausSet kraus_re_projective_point(const Operator& o1);

/// Returns e > 0 when the spectrum of O1 is exactly {+e, -e}; throws otherwise.
double two_point_spectrum(const Operator& o1, double tol = 1e-10);

struct MeasurementBranch {
  double probability = 0.0;
  StateVector post_state;  ///< renormalized; zero vector when probability == 0
};

std::vector<MeasurementBranch> apply_measurement(const StateVector& psi, const KrausSet& ks,
                                                 double completeness_tol = 1e-11);

/// Weighted pure-state ensemble standing in for a low-rank density operator.
struct Ensemble {
  std::vector<double> weights;
  std::vector<StateVector> states;
};

struct EnsembleBranch {
  double probability = 0.0;
  Ensemble post;
};

std::vector<EnsembleBranch> apply_measurement(const Ensemble& rho, const KrausSet& ks,
                                              double completeness_tol = 1e-11);

/// Target branches <m| exp(-i lambda B (x) O1) |phi, psi> computed on the
/// joint ancilla-target state, unnormalized; the reference for kraus_set.
std::vector<Vector> joint_branches(const Operator& b, const StateVector& phi, double lambda, const Operator& o1,
                                   const Matrix& basis, const StateVector& psi);

/// Largest deviation between apply_measurement(psi, ks) and joint_branches:
/// outcome probabilities, and post-states compared as sqrt(p) * post.
double povm_equivalence_residual(const KrausSet& ks, const std::vector<Vector>& branches, const StateVector& psi);

/// [<O2>_{-theta} - <O2>_{+theta}] / (4 sin theta), where the state is rotated by
/// exp(-+ i theta O1) at t1. Exact for (O1)^2 = 1/4 (single-site spin 1/2);
/// otherwise equal to Im C up to O(theta^2).
double ancilla_free_im(const CorrelationTask& task, double theta);

/// Sequential projective measurements of O1 at t1 and O2 at t2, labelled (e1, e_o).
OutcomeDistribution projective_pair_distribution(const CorrelationTask& task);

/// sum e1 e_o P(e1, e_o); equals Re C when O1 has a two-point spectrum.
double ancilla_free_re(const CorrelationTask& task);

/// Branch data for trajectory sampling of the sequential protocol: the
/// probabilities of the t1 outcome and, per branch, of the t2 outcome.
struct ProjectiveTrajectoryModel {
  std::vector<double> first_labels;
  std::vector<double> first_probabilities;
  std::vector<double> second_labels;
  std::vector<std::vector<double>> conditional;  ///< [first][second]
};

ProjectiveTrajectoryModel projective_trajectory_model(const CorrelationTask& task);

}  // namespace nimp
