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

// Two ancillas coupled to the same observable at t1, one through S^z and
// one through S^y, so that Re C and Im C come out of one joint distribution.

#pragma once

#include <array>
#include <vector>

#include "nimp/core.hpp"
#include "nimp/lattice.hpp"
#include "nimp/protocol.hpp"

namespace nimp {

enum class CouplingOrder { first_then_second, second_then_first };

struct TwoAncillaRun {
  CorrelationTask task;
  AncillaSpec phi1;
  AncillaSpec phi2;
  Operator b1;  ///< on ancilla 1
  Operator b2;  ///< on ancilla 2
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  CouplingOrder order = CouplingOrder::first_then_second;

  /// Equal-superposition spin-1/2 ancillas with B1 = S^z and B2 = S^y.
  static TwoAncillaRun standard(CorrelationTask task, double lambda1, double lambda2);

  /// Dimensions, S^z readout of both ancillas, and the commutator of the two
  /// coupling Hamiltonians (checked on the ancilla factors, since
  /// [B1 (x) 1 (x) O1, 1 (x) B2 (x) O1] = [B1 (x) 1, 1 (x) B2] (x) O1^2).
  void validate() const;
};

struct ThreeWayDistribution {
  /// (m1, m2, e_o)
  std::vector<std::array<double, 3>> labels;
  std::vector<double> probabilities;

  double total() const;
};

ThreeWayDistribution two_ancilla_distribution(const TwoAncillaRun& run);

enum class KeepAncilla { first, second };

OutcomeDistribution marginalize(const ThreeWayDistribution& dist, KeepAncilla keep);

struct SimultaneousEstimate {
  double im_est = 0.0;
  double re_est = 0.0;
  double weighted1 = 0.0;
  double weighted2 = 0.0;
};

/// im_est = W1 / (-2 lambda1 <B1 S^z>_phi1), re_est = W2 / (-2 lambda2 Im <B2 S^z>_phi2);
/// both prefactors equal -lambda/2 for the equal superposition.
SimultaneousEstimate simultaneous_estimate(const TwoAncillaRun& run);

/// W1 = p1 Im C and W2 = p2 Re C to first order; returns p1 or p2 after
/// checking the ancilla conditions that make the split exact.
double simultaneous_prefactor(const TwoAncillaRun& run, KeepAncilla part);

/// Estimates from an already computed distribution (exact or empirical).
SimultaneousEstimate simultaneous_estimate(const TwoAncillaRun& run, const ThreeWayDistribution& dist);

struct SimAncillaReport {
  bool balanced_z = false;
  bool zero_y = false;
  /// r_m = r_{-m} and every theta_m - theta_{m+1} an integer multiple of pi.
  bool phase_condition = false;
  double sz_expectation = 0.0;
  double sy_expectation = 0.0;
};

SimAncillaReport validate_sim_ancilla(const AncillaSpec& phi, double tol = 1e-12);

/// sum_m (-1)^{k_m} r_m |m> in the S^z basis; `weights` must be symmetric
/// and normalized.
AncillaSpec generate_valid_ancilla_states(HalfInteger zeta, const std::vector<double>& weights,
                                          const std::vector<int>& signs);

/// sqrt(binom(2 zeta, zeta - m)) / 2^zeta: the equatorial spin-coherent magnitudes.
std::vector<double> spin_coherent_weights(HalfInteger zeta);

}  // namespace nimp
