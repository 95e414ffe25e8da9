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

// Single-ancilla noninvasive measurement protocol.
//
// An ancilla spin zeta is prepared in |phi>, coupled to the target at t1 by
// exp(-i lambda B (x) O1), and measured in the eigenbasis of S^alpha; the
// target is measured in the eigenbasis of O2 at t2. The weighted correlation
//
//   W = sum_{m, o} m e_o P(m, e_o)
//     = <S^alpha>_phi <O2(t2)> - 2 lambda Im(<B S^alpha>_phi C) + O(lambda^2)
//
// gives Im C for B = S^alpha and Re C for B = (i/2)(S_alpha^- - S_alpha^+).

#pragma once

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "nimp/core.hpp"
#include "nimp/lattice.hpp"

namespace nimp {

enum class Axis { x, y, z };

std::string_view to_string(Axis axis);

/// Matrix whose k-th column is the S^alpha eigenvector with m = zeta - k,
/// expressed in the S^z basis. For alpha = x, y the frame is the cyclic
/// rotation (z -> x -> y), so the alpha-ladder operators are
/// S_x^{+-} = S^y +- i S^z and S_y^{+-} = S^z +- i S^x.
Matrix ancilla_frame(HalfInteger zeta, Axis axis);

/// Spin component `kind` taken with respect to `axis` (plus/minus are the
/// ladder operators of that axis).
Operator axis_spin_operator(HalfInteger zeta, Axis axis, SpinComponent kind);

/// Ancilla preparation: coefficients r_m e^{i theta_m} in the S^alpha
/// eigenbasis, indexed m = zeta, zeta-1, ..., -zeta.
struct AncillaSpec {
  HalfInteger zeta;
  Axis axis = Axis::z;
  std::vector<double> magnitudes;
  std::vector<double> phases;

  /// r_m = (2 zeta + 1)^{-1/2}, theta_m = 0.
  static AncillaSpec equal_superposition(HalfInteger zeta, Axis axis = Axis::z);

  /// Sizes match 2 zeta + 1, magnitudes non-negative, sum r_m^2 = 1.
  void validate() const;
  /// r_m = r_{-m} for all m.
  bool balanced(double tol = 1e-12) const;
  bool is_equal_superposition(double tol = 1e-12) const;
};

StateVector ancilla_state(const AncillaSpec& spec);

enum class CouplingMode { exact, linearized };
enum class ReadoutTiming { deferred, immediate };

struct CouplingSpec {
  int variant = 1;  ///< 1: B = S^alpha (Im C); 2: B = (i/2)(S_alpha^- - S_alpha^+) (Re C).
  double lambda = 0.0;
  CouplingMode mode = CouplingMode::exact;
};

Operator coupling_generator(int variant, HalfInteger zeta, Axis axis);

/// |lambda| ||B (x) O1||, the quantity the weak-coupling premise needs small.
double coupling_strength(const CouplingSpec& spec, HalfInteger zeta, Axis axis, const Operator& o1);

/// Applies exp(-i lambda B (x) O1) (exact) or 1 - i lambda B (x) O1
/// (linearized, result flagged un-normalized) to a joint state whose leading
/// factors form B's space and whose trailing factors form O1's space.
StateVector couple(const StateVector& joint, const Operator& b, const Operator& o1, double lambda,
                   CouplingMode mode);

struct NimpRun {
  CorrelationTask task;
  AncillaSpec ancilla;
  CouplingSpec coupling;
  ReadoutTiming timing = ReadoutTiming::deferred;

  void validate() const;
};

/// Exact Born probabilities over (m_alpha, e_o).
struct OutcomeDistribution {
  std::vector<std::array<double, 2>> labels;
  std::vector<double> probabilities;
  /// Smallest probability before clipping (exact mode clips values in
  /// [-1e-12, 0) to zero; linearized mode keeps negative values).
  double min_raw_probability = 0.0;
  bool positivity_violated = false;

  double total() const;
};

OutcomeDistribution outcome_distribution(const NimpRun& run);

/// sum m e P(m, e).
double weighted_correlation(const OutcomeDistribution& dist);

/// Closed-form prefactors for the equal-superposition ancilla:
/// f1 = (2 s^3 + 3 s^2 + s) / (3 (2 s + 1)),
/// f2 = sum_{m=-s}^{s-1} c_+(s, m) / (2 (2 s + 1)).
double f_prefactor(int variant, HalfInteger zeta);

/// <B S^alpha>_phi for an arbitrary ancilla state; for the equal
/// superposition it equals f1 (variant 1) and i f2 (variant 2).
cplx ancilla_prefactor(const AncillaSpec& spec, int variant);

/// C = -(1/(2 lambda)) (W2 / f2 + i W1 / f1).
cplx reconstruct(double weighted1, double weighted2, double lambda, HalfInteger zeta);

/// Solves W_k = -2 lambda Im(w_k C) for C given the two ancilla prefactors
/// w_k = <B_k S^alpha>_phi; reduces to reconstruct() for the equal superposition.
cplx reconstruct_general(double weighted1, double weighted2, double lambda, cplx w1, cplx w2);

struct ProtocolResult {
  double weighted = 0.0;
  OutcomeDistribution distribution;
};

ProtocolResult run_protocol(const NimpRun& run);

/// Both variants at the same lambda, reconstructed with the prefactors of
/// the given ancilla state.
cplx estimate_correlation(const CorrelationTask& task, const AncillaSpec& ancilla, double lambda,
                          CouplingMode mode = CouplingMode::exact,
                          ReadoutTiming timing = ReadoutTiming::deferred);

}  // namespace nimp
