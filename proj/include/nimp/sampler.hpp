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

// Finite-shot sampling of the protocol distributions.
//
// Shot i draws its uniforms from a hash of (seed, descriptor, i), so a record
// depends only on (descriptor, seed, n) and never on how shots are split
// across threads.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nimp/core.hpp"
#include "nimp/lattice.hpp"
#include "nimp/povm.hpp"
#include "nimp/protocol.hpp"
#include "nimp/simultaneous.hpp"

namespace nimp {

/// Stateless counter-based generator: uniform in [0, 1) for (key, counter).
double counter_uniform(std::uint64_t key, std::uint64_t counter) noexcept;

/// Stream key for a (seed, descriptor) pair.
std::uint64_t stream_key(std::uint64_t seed, std::string_view descriptor) noexcept;

struct ShotRecord {
  std::string descriptor;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  std::vector<std::vector<double>> labels;  ///< outcome tuples
  std::vector<std::uint64_t> counts;        ///< aligned with labels

  std::uint64_t total() const;
};

struct SampleOptions {
  std::string descriptor;
  unsigned threads = 1;
  /// Allowed |sum p - 1| before the distribution counts as un-normalized.
  double normalization_tol = 1e-10;
};

/// Multinomial draw of n shots from a labelled distribution.
ShotRecord sample(const std::vector<std::vector<double>>& labels, const std::vector<double>& probabilities,
                  std::uint64_t n, std::uint64_t seed, const SampleOptions& options = {});
ShotRecord sample(const OutcomeDistribution& dist, std::uint64_t n, std::uint64_t seed,
                  const SampleOptions& options = {});
ShotRecord sample(const ThreeWayDistribution& dist, std::uint64_t n, std::uint64_t seed,
                  const SampleOptions& options = {});

/// Sequential projective protocol simulated shot by shot: draw the t1
/// outcome, then the t2 outcome from the collapsed branch.
ShotRecord sample_trajectories(const ProjectiveTrajectoryModel& model, std::uint64_t n, std::uint64_t seed,
                               const SampleOptions& options = {});

/// Linear estimator (1/n) sum_shots x_a x_b / prefactor over two components
/// of the outcome tuple.
struct EstimatorSpec {
  std::size_t first = 0;   ///< ancilla (or t1) component
  std::size_t second = 1;  ///< target component at t2
  double prefactor = 1.0;
  double lambda = 0.0;
};

/// Im C from variant 1 or Re C from variant 2 of a single-ancilla run. The
/// ancilla needs <S^alpha> = 0, and for variant 2 a purely imaginary
/// <B S^alpha>, so that one weighted correlation isolates one part of C.
EstimatorSpec nimp_estimator(const NimpRun& run);

/// Components of the simultaneous protocol: first ancilla gives Im C, second Re C.
EstimatorSpec simultaneous_estimator(const TwoAncillaRun& run, KeepAncilla part);

/// sum e1 e_o P(e1, e_o) for the sequential projective protocol.
EstimatorSpec ancilla_free_re_estimator();

struct EstimateWithError {
  cplx value{0.0, 0.0};
  double std_error = 0.0;
  std::uint64_t n = 0;
  double lambda = 0.0;
};

/// Plug-in estimate with a multinomial delta-method standard error.
EstimateWithError estimate_from_shots(const ShotRecord& record, const EstimatorSpec& spec);

/// Same estimate applied to an exact distribution (the n -> infinity limit).
double estimate_from_distribution(const std::vector<std::vector<double>>& labels,
                                  const std::vector<double>& probabilities, const EstimatorSpec& spec);

/// Standard error from multinomial resampling of the empirical frequencies.
double bootstrap_std_error(const ShotRecord& record, const EstimatorSpec& spec, std::size_t resamples,
                           std::uint64_t seed, unsigned threads = 1);

enum class ErrorMethod { delta, bootstrap };

/// Both variants at one lambda with independent shot budgets of n each;
/// n == 0 returns the exact-probability estimate with zero error.
struct ComplexEstimateOptions {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  ErrorMethod error_method = ErrorMethod::delta;
  std::size_t bootstrap_resamples = 200;
  CouplingMode mode = CouplingMode::exact;
};

EstimateWithError sampled_correlation(const CorrelationTask& task, const AncillaSpec& ancilla, double lambda,
                                      const ComplexEstimateOptions& options);

struct LambdaScanRow {
  double lambda = 0.0;
  double abs_error = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  cplx estimate{0.0, 0.0};
};

struct LambdaScan {
  std::vector<LambdaScanRow> rows;
  cplx oracle{0.0, 0.0};
  std::size_t argmin = 0;

  /// abs_error has a strict minimum away from both grid ends.
  bool has_interior_minimum() const;
  /// CSV with header "lambda,abs_error,std_error,n,seed".
  std::string to_csv() const;
};

LambdaScan lambda_scan(const CorrelationTask& task, const AncillaSpec& ancilla, const std::vector<double>& grid,
                       const ComplexEstimateOptions& options);

/// n log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace nimp
