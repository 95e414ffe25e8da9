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

#include "nimp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "internal.hpp"

namespace nimp {

Operator build_hamiltonian(const std::vector<HamiltonianTerm>& terms, const HilbertSpace& space) {
  Operator h = Operator::zero(space);
  for (const auto& term : terms) {
    std::set<int> seen;
    Operator product = Operator::identity(space);
    for (const auto& [site, local] : term.factors) {
      require(site >= 0 && site < space.num_factors(), ErrorCode::dimension_mismatch,
              "Hamiltonian term references site " + std::to_string(site) +
                  " on a lattice with " + std::to_string(space.num_factors()) + " sites");
      require(seen.insert(site).second, ErrorCode::invalid_argument,
              "Hamiltonian term repeats site " + std::to_string(site));
      const Operator embedded = embed(local, site, space);
      detail::require_hermitian(embedded, "Hamiltonian term factor");
      product = product * embedded;
    }
    require(std::isfinite(term.coefficient), ErrorCode::invalid_argument,
            "Hamiltonian coefficient must be finite");
    h = h + cplx(term.coefficient) * product;
  }
  return h;
}

namespace {

std::vector<std::pair<int, int>> bonds(int sites, bool periodic) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i + 1 < sites; ++i) out.emplace_back(i, i + 1);
  if (periodic && sites > 2) out.emplace_back(sites - 1, 0);
  return out;
}

}  // namespace

std::vector<HamiltonianTerm> tfim_terms(int sites, double coupling, double field, HalfInteger s,
                                        bool periodic) {
  require(sites >= 1, ErrorCode::invalid_argument, "TFIM needs at least one site");
  const Matrix sz = spin_operator(s, SpinComponent::z).matrix();
  const Matrix sx = spin_operator(s, SpinComponent::x).matrix();
  std::vector<HamiltonianTerm> terms;
  for (auto [i, j] : bonds(sites, periodic)) terms.push_back({-coupling, {{i, sz}, {j, sz}}});
  for (int i = 0; i < sites; ++i) terms.push_back({-field, {{i, sx}}});
  return terms;
}

std::vector<HamiltonianTerm> xxz_terms(int sites, double coupling, double anisotropy,
                                       double field, HalfInteger s, bool periodic) {
  require(sites >= 1, ErrorCode::invalid_argument, "XXZ chain needs at least one site");
  const Matrix sx = spin_operator(s, SpinComponent::x).matrix();
  const Matrix sy = spin_operator(s, SpinComponent::y).matrix();
  const Matrix sz = spin_operator(s, SpinComponent::z).matrix();
  std::vector<HamiltonianTerm> terms;
  for (auto [i, j] : bonds(sites, periodic)) {
    terms.push_back({coupling, {{i, sx}, {j, sx}}});
    terms.push_back({coupling, {{i, sy}, {j, sy}}});
    terms.push_back({coupling * anisotropy, {{i, sz}, {j, sz}}});
  }
  for (int i = 0; i < sites; ++i) terms.push_back({-field, {{i, sz}}});
  return terms;
}

// --- Schedule ---------------------------------------------------------------

Schedule::Schedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  require(!segments_.empty(), ErrorCode::invalid_argument, "schedule needs at least one segment");
  for (const auto& seg : segments_) {
    require(seg.duration >= 0.0 && std::isfinite(seg.duration), ErrorCode::invalid_argument,
            "schedule durations must be finite and non-negative");
    require(seg.hamiltonian.space() == segments_.front().hamiltonian.space(),
            ErrorCode::dimension_mismatch, "schedule segments live on different spaces");
    detail::require_hermitian(seg.hamiltonian, "schedule Hamiltonian");
  }
}

Schedule Schedule::constant(const Operator& hamiltonian) {
  return Schedule({Segment{0.0, hamiltonian}});
}

double Schedule::total_duration() const noexcept {
  double total = 0.0;
  for (const auto& seg : segments_) total += seg.duration;
  return total;
}

namespace {

// Calls fn(hamiltonian, signed duration) for every piece between the two
// times, in the order the pieces act on a state.
template <typename Fn>
void for_each_piece(const std::vector<Schedule::Segment>& segments, double from, double to, Fn&& fn) {
  require(std::isfinite(from) && std::isfinite(to), ErrorCode::invalid_argument,
          "propagation times must be finite");
  const double lo = std::min(from, to);
  const double hi = std::max(from, to);
  struct Piece {
    const Operator* h;
    double length;
  };
  std::vector<Piece> pieces;
  double start = 0.0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const bool last = k + 1 == segments.size();
    const double end = last ? std::numeric_limits<double>::infinity() : start + segments[k].duration;
    const double a = std::max(lo, start);
    const double b = std::min(hi, end);
    if (b > a) pieces.push_back({&segments[k].hamiltonian, b - a});
    start = end;
  }
  if (to >= from) {
    for (const auto& p : pieces) fn(*p.h, p.length);
  } else {
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) fn(*it->h, -it->length);
  }
}

}  // namespace

Operator Schedule::propagator(double from, double to) const {
  Operator u = Operator::identity(space());
  for_each_piece(segments_, from, to,
                 [&](const Operator& h, double dt) { u = hermitian_propagator(h, dt) * u; });
  return u;
}

StateVector propagate(const StateVector& psi, const Schedule& schedule, double from, double to) {
  require(psi.space == schedule.space(), ErrorCode::dimension_mismatch,
          "state and schedule live on different spaces");
  Vector v = psi.amplitudes;
  for_each_piece(schedule.segments(), from, to, [&](const Operator& h, double dt) {
    v = hermitian_propagator(h, dt).matrix() * v;
  });
  return StateVector(psi.space, std::move(v), psi.normalized);
}

StateVector evolve(const StateVector& psi, const Schedule& schedule, double t) {
  require(t >= 0.0, ErrorCode::invalid_argument, "evolution time must be non-negative");
  return propagate(psi, schedule, 0.0, t);
}

Operator heisenberg_observable(const Operator& op, double t, const Schedule& schedule) {
  require(op.space() == schedule.space(), ErrorCode::dimension_mismatch,
          "observable and schedule live on different spaces");
  require(t >= 0.0, ErrorCode::invalid_argument, "Heisenberg time must be non-negative");
  const Matrix u = schedule.propagator(0.0, t).matrix();
  return Operator(op.space(), u.adjoint() * op.matrix() * u);
}

// --- correlation task -------------------------------------------------------

void CorrelationTask::validate() const {
  const HilbertSpace& space = schedule.space();
  require(psi0.space == space, ErrorCode::dimension_mismatch,
          "initial state does not live on the schedule's space");
  require(o1.space() == space, ErrorCode::dimension_mismatch,
          "O1 does not live on the schedule's space");
  require(o2.space() == space, ErrorCode::dimension_mismatch,
          "O2 does not live on the schedule's space");
  require(std::abs(psi0.norm() - 1.0) < kNormTol * 100, ErrorCode::not_normalized,
          "initial state must be normalized");
  detail::require_hermitian(o1, "O1");
  detail::require_hermitian(o2, "O2");
  require(t1 >= 0.0 && t2 >= 0.0, ErrorCode::invalid_argument,
          "correlation times must be non-negative");
}

void CorrelationTask::validate_ordered() const {
  validate();
  require(t1 <= t2, ErrorCode::precondition, "protocols require t1 <= t2");
}

cplx exact_correlation(const CorrelationTask& task) {
  task.validate();
  // right = U(t1) U^dagger(t2) O2 U(t2) psi, left = O1 U(t1) psi.
  StateVector right = propagate(task.psi0, task.schedule, 0.0, task.t2);
  right = task.o2 * right;
  right = propagate(right, task.schedule, task.t2, task.t1);
  const StateVector left = task.o1 * propagate(task.psi0, task.schedule, 0.0, task.t1);
  return inner(left, right);
}

}  // namespace nimp
