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

// Target Hamiltonians, piecewise-constant time evolution and the exact
// dynamic-correlation oracle.

#pragma once

#include <utility>
#include <vector>

#include "nimp/core.hpp"

namespace nimp {

struct HamiltonianTerm {
  double coefficient = 1.0;
  /// (site, local Hermitian matrix) pairs on distinct sites.
  std::vector<std::pair<int, Matrix>> factors;
};

Operator build_hamiltonian(const std::vector<HamiltonianTerm>& terms, const HilbertSpace& space);

/// H = -J sum_<ij> S^z_i S^z_j - g sum_i S^x_i on an open (or periodic) chain.
std::vector<HamiltonianTerm> tfim_terms(int sites, double coupling, double field, HalfInteger s,
                                        bool periodic = false);

/// H = J sum_<ij> (S^x_i S^x_j + S^y_i S^y_j + delta S^z_i S^z_j) - h sum_i S^z_i.
std::vector<HamiltonianTerm> xxz_terms(int sites, double coupling, double anisotropy,
                                       double field, HalfInteger s, bool periodic = false);

/// Ordered piecewise-constant Hamiltonian. The last segment extends
/// indefinitely past the sum of the durations.
class Schedule {
 public:
  struct Segment {
    double duration = 0.0;
    Operator hamiltonian;
  };

  explicit Schedule(std::vector<Segment> segments);
  static Schedule constant(const Operator& hamiltonian);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const HilbertSpace& space() const { return segments_.front().hamiltonian.space(); }
  double total_duration() const noexcept;

  /// U(to, from); backwards in time when to < from.
  Operator propagator(double from, double to) const;

 private:
  std::vector<Segment> segments_;
};

/// Propagates psi from time `from` to time `to`.
StateVector propagate(const StateVector& psi, const Schedule& schedule, double from, double to);

/// Evolves psi from t = 0 to t.
StateVector evolve(const StateVector& psi, const Schedule& schedule, double t);

/// U^dagger(t) O U(t).
Operator heisenberg_observable(const Operator& op, double t, const Schedule& schedule);

struct CorrelationTask {
  StateVector psi0;
  Operator o1;
  double t1 = 0.0;
  Operator o2;
  double t2 = 0.0;
  Schedule schedule;

  /// Dimensional consistency, Hermiticity and t1, t2 >= 0.
  void validate() const;
  /// validate() plus t1 <= t2, which every measurement protocol needs.
  void validate_ordered() const;
};

/// C = <psi| O1(t1) O2(t2) |psi>, evaluated by state propagation.
cplx exact_correlation(const CorrelationTask& task);

}  // namespace nimp
