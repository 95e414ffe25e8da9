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

#include "nimp/simultaneous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "internal.hpp"

namespace nimp {

TwoAncillaRun TwoAncillaRun::standard(CorrelationTask task, double lambda1, double lambda2) {
  const HalfInteger half = HalfInteger::from_twice(1);
  return TwoAncillaRun{std::move(task),
                       AncillaSpec::equal_superposition(half),
                       AncillaSpec::equal_superposition(half),
                       spin_operator(half, SpinComponent::z),
                       spin_operator(half, SpinComponent::y),
                       lambda1,
                       lambda2,
                       CouplingOrder::first_then_second};
}

void TwoAncillaRun::validate() const {
  task.validate_ordered();
  phi1.validate();
  phi2.validate();
  require(phi1.axis == Axis::z && phi2.axis == Axis::z, ErrorCode::invalid_argument,
          "both ancillas are read out in their S^z eigenbases");
  require(b1.dim() == phi1.zeta.dim(), ErrorCode::dimension_mismatch, "B1 does not act on ancilla 1");
  require(b2.dim() == phi2.zeta.dim(), ErrorCode::dimension_mismatch, "B2 does not act on ancilla 2");
  detail::require_hermitian(b1, "B1");
  detail::require_hermitian(b2, "B2");
  require(std::isfinite(lambda1) && std::isfinite(lambda2), ErrorCode::invalid_argument,
          "coupling times must be finite");
  const Matrix a1 = detail::kron(b1.matrix(), Matrix::Identity(b2.dim(), b2.dim()));
  const Matrix a2 = detail::kron(Matrix::Identity(b1.dim(), b1.dim()), b2.matrix());
  require(max_abs_diff(a1 * a2, a2 * a1) < 1e-12, ErrorCode::precondition,
          "the two coupling Hamiltonians do not commute");
}

double ThreeWayDistribution::total() const {
  return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

ThreeWayDistribution two_ancilla_distribution(const TwoAncillaRun& run) {
  run.validate();
  const CorrelationTask& task = run.task;
  const int d1 = run.phi1.zeta.dim();
  const int d2 = run.phi2.zeta.dim();
  const Eigen::Index dt = task.psi0.space.total_dim();

  const HilbertSpace ancillas({d1, d2});
  const Operator a1(ancillas, detail::kron(run.b1.matrix(), Matrix::Identity(d2, d2)), {0});
  const Operator a2(ancillas, detail::kron(Matrix::Identity(d1, d1), run.b2.matrix()), {1});

  StateVector joint = kron(kron(ancilla_state(run.phi1), ancilla_state(run.phi2)),
                           evolve(task.psi0, task.schedule, task.t1));
  if (run.order == CouplingOrder::first_then_second) {
    joint = couple(joint, a1, task.o1, run.lambda1, CouplingMode::exact);
    joint = couple(joint, a2, task.o1, run.lambda2, CouplingMode::exact);
  } else {
    joint = couple(joint, a2, task.o1, run.lambda2, CouplingMode::exact);
    joint = couple(joint, a1, task.o1, run.lambda1, CouplingMode::exact);
  }

  const Matrix y = task.schedule.propagator(task.t1, task.t2).matrix() *
                   detail::as_target_columns(joint.amplitudes, dt);
  const SpectralDecomposition o2 = spectral_decompose(task.o2);

  ThreeWayDistribution dist;
  for (int k1 = 0; k1 < d1; ++k1) {
    for (int k2 = 0; k2 < d2; ++k2) {
      const Vector branch = y.col(k1 * d2 + k2);
      for (std::size_t o = 0; o < o2.size(); ++o) {
        const double p = branch.dot(o2.projectors[o].matrix() * branch).real();
        dist.labels.push_back({run.phi1.zeta.m(k1), run.phi2.zeta.m(k2), o2.eigenvalues[o]});
        dist.probabilities.push_back(p < 0.0 && p >= -1e-12 ? 0.0 : p);
      }
    }
  }
  return dist;
}

OutcomeDistribution marginalize(const ThreeWayDistribution& dist, KeepAncilla keep) {
  require(dist.labels.size() == dist.probabilities.size(), ErrorCode::dimension_mismatch,
          "distribution labels and probabilities differ in length");
  const std::size_t index = keep == KeepAncilla::first ? 0 : 1;
  OutcomeDistribution out;
  for (std::size_t i = 0; i < dist.labels.size(); ++i) {
    const std::array<double, 2> label{dist.labels[i][index], dist.labels[i][2]};
    auto it = std::find(out.labels.begin(), out.labels.end(), label);
    if (it == out.labels.end()) {
      out.labels.push_back(label);
      out.probabilities.push_back(dist.probabilities[i]);
    } else {
      out.probabilities[static_cast<std::size_t>(it - out.labels.begin())] += dist.probabilities[i];
    }
  }
  out.min_raw_probability = out.probabilities.empty()
                                ? 0.0
                                : *std::min_element(out.probabilities.begin(), out.probabilities.end());
  return out;
}

namespace {

struct SimPrefactors {
  double im_scale;  // W1 = im_scale * Im C + O(lambda^2)
  double re_scale;  // W2 = re_scale * Re C + O(lambda^2)
};

SimPrefactors sim_prefactors(const TwoAncillaRun& run) {
  require(run.lambda1 != 0.0 && run.lambda2 != 0.0, ErrorCode::precondition,
          "simultaneous estimates require nonzero lambda1 and lambda2");
  const StateVector phi1 = ancilla_state(run.phi1);
  const StateVector phi2 = ancilla_state(run.phi2);
  const Operator sz1 = spin_operator(run.phi1.zeta, SpinComponent::z);
  const Operator sz2 = spin_operator(run.phi2.zeta, SpinComponent::z);
  require(std::abs(expectation(phi1, sz1)) <= 1e-12, ErrorCode::precondition,
          "ancilla 1 needs <S^z> = 0");
  require(std::abs(expectation(phi2, sz2)) <= 1e-12, ErrorCode::precondition,
          "ancilla 2 needs <S^z> = 0");
  require(std::abs(expectation(phi2, run.b2)) <= 1e-12, ErrorCode::precondition,
          "ancilla 2 needs <B2> = 0 (for B2 = S^y: <S^y> = 0)");
  const cplx w1 = expectation(phi1, run.b1 * sz1);
  const cplx w2 = expectation(phi2, run.b2 * sz2);
  require(std::abs(w1.imag()) <= 1e-12 && std::abs(w1.real()) > 1e-12, ErrorCode::precondition,
          "<B1 S^z> must be real and nonzero to isolate Im C");
  require(std::abs(w2.real()) <= 1e-12 && std::abs(w2.imag()) > 1e-12, ErrorCode::precondition,
          "<B2 S^z> must be imaginary and nonzero to isolate Re C");
  return {-2.0 * run.lambda1 * w1.real(), -2.0 * run.lambda2 * w2.imag()};
}

}  // namespace

double simultaneous_prefactor(const TwoAncillaRun& run, KeepAncilla part) {
  const SimPrefactors pf = sim_prefactors(run);
  return part == KeepAncilla::first ? pf.im_scale : pf.re_scale;
}

SimultaneousEstimate simultaneous_estimate(const TwoAncillaRun& run, const ThreeWayDistribution& dist) {
  const SimPrefactors pf = sim_prefactors(run);
  SimultaneousEstimate est;
  est.weighted1 = weighted_correlation(marginalize(dist, KeepAncilla::first));
  est.weighted2 = weighted_correlation(marginalize(dist, KeepAncilla::second));
  est.im_est = est.weighted1 / pf.im_scale;
  est.re_est = est.weighted2 / pf.re_scale;
  return est;
}

SimultaneousEstimate simultaneous_estimate(const TwoAncillaRun& run) {
  run.validate();
  sim_prefactors(run);
  return simultaneous_estimate(run, two_ancilla_distribution(run));
}

SimAncillaReport validate_sim_ancilla(const AncillaSpec& phi, double tol) {
  const StateVector state = ancilla_state(phi);
  SimAncillaReport report;
  report.sz_expectation = expectation(state, spin_operator(phi.zeta, SpinComponent::z)).real();
  report.sy_expectation = expectation(state, spin_operator(phi.zeta, SpinComponent::y)).real();
  report.balanced_z = std::abs(report.sz_expectation) <= tol;
  report.zero_y = std::abs(report.sy_expectation) <= tol;

  report.phase_condition = phi.axis == Axis::z && phi.balanced(tol);
  for (std::size_t k = 0; report.phase_condition && k + 1 < phi.phases.size(); ++k) {
    if (phi.magnitudes[k] * phi.magnitudes[k + 1] == 0.0) continue;
    const double turns = (phi.phases[k] - phi.phases[k + 1]) / std::numbers::pi;
    report.phase_condition = std::abs(turns - std::round(turns)) <= 1e-9;
  }
  return report;
}

AncillaSpec generate_valid_ancilla_states(HalfInteger zeta, const std::vector<double>& weights,
                                          const std::vector<int>& signs) {
  const auto d = static_cast<std::size_t>(zeta.dim());
  require(weights.size() == d && signs.size() == d, ErrorCode::dimension_mismatch,
          "weights and signs need 2 zeta + 1 entries");
  AncillaSpec spec{zeta, Axis::z, weights, std::vector<double>(d, 0.0)};
  require(spec.balanced(1e-12), ErrorCode::invalid_argument, "weights must satisfy r_m = r_{-m}");
  for (std::size_t k = 0; k < d; ++k) spec.phases[k] = signs[k] * std::numbers::pi;
  spec.validate();
  return spec;
}

std::vector<double> spin_coherent_weights(HalfInteger zeta) {
  const int n = zeta.twice();
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) {
    // binom(n, k) / 2^n via lgamma keeps large zeta finite.
    const double log_b = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    w[static_cast<std::size_t>(k)] = std::exp(0.5 * (log_b - n * std::log(2.0)));
  }
  return w;
}

}  // namespace nimp
