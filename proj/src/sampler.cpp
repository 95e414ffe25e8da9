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

#include "nimp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "internal.hpp"

namespace nimp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Runs body(begin, end, slot) over [0, n) split into contiguous chunks.
template <class Body>
void parallel_chunks(std::uint64_t n, unsigned threads, Body&& body) {
  const unsigned workers = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(n, 1)));
  if (workers == 1) {
    body(std::uint64_t{0}, n, 0u);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min<std::uint64_t>(n, w * chunk);
    const std::uint64_t end = std::min<std::uint64_t>(n, begin + chunk);
    pool.emplace_back([&body, begin, end, w] { body(begin, end, w); });
  }
  for (auto& t : pool) t.join();
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  return cdf;
}

// Index of the first cdf entry exceeding u * total; zero-probability
// outcomes are never returned.
std::size_t draw(const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it != cdf.end()) return static_cast<std::size_t>(it - cdf.begin());
  // Rounding pushed the target onto the total: take the last populated outcome.
  std::size_t idx = cdf.size() - 1;
  while (idx > 0 && cdf[idx] == cdf[idx - 1]) --idx;
  return idx;
}

void check_distribution(const std::vector<double>& probabilities, double tol) {
  require(!probabilities.empty(), ErrorCode::invalid_argument, "cannot sample from an empty distribution");
  double total = 0.0;
  for (double p : probabilities) {
    require(std::isfinite(p) && p >= 0.0, ErrorCode::not_normalized,
            "distribution has a negative or non-finite probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= tol, ErrorCode::not_normalized,
          "distribution is not normalized (sum = " + std::to_string(total) + ")");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double counter_uniform(std::uint64_t key, std::uint64_t counter) noexcept {
  return static_cast<double>(mix64(key + mix64(counter * kGolden + kGolden)) >> 11) * 0x1.0p-53;
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view descriptor) noexcept {
  return mix64(seed ^ mix64(fnv1a(descriptor)));
}

std::uint64_t ShotRecord::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

ShotRecord sample(const std::vector<std::vector<double>>& labels, const std::vector<double>& probabilities,
                  std::uint64_t n, std::uint64_t seed, const SampleOptions& options) {
  require(labels.size() == probabilities.size(), ErrorCode::dimension_mismatch,
          "labels and probabilities differ in length");
  require(n >= 1, ErrorCode::invalid_argument, "shot count n must be at least 1");
  check_distribution(probabilities, options.normalization_tol);

  const std::vector<double> cdf = cumulative(probabilities);
  const std::uint64_t key = stream_key(seed, options.descriptor);
  const unsigned workers = std::max(1u, options.threads);
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(cdf.size(), 0));
  parallel_chunks(n, workers, [&](std::uint64_t begin, std::uint64_t end, unsigned slot) {
    auto& local = partial[slot];
    for (std::uint64_t i = begin; i < end; ++i) ++local[draw(cdf, counter_uniform(key, i))];
  });

  ShotRecord record{options.descriptor, seed, n, labels, std::vector<std::uint64_t>(cdf.size(), 0)};
  for (const auto& local : partial) {
    for (std::size_t k = 0; k < local.size(); ++k) record.counts[k] += local[k];
  }
  return record;
}

ShotRecord sample(const OutcomeDistribution& dist, std::uint64_t n, std::uint64_t seed,
                  const SampleOptions& options) {
  std::vector<std::vector<double>> labels;
  for (const auto& l : dist.labels) labels.push_back({l[0], l[1]});
  return sample(labels, dist.probabilities, n, seed, options);
}

ShotRecord sample(const ThreeWayDistribution& dist, std::uint64_t n, std::uint64_t seed,
                  const SampleOptions& options) {
  std::vector<std::vector<double>> labels;
  for (const auto& l : dist.labels) labels.push_back({l[0], l[1], l[2]});
  return sample(labels, dist.probabilities, n, seed, options);
}

ShotRecord sample_trajectories(const ProjectiveTrajectoryModel& model, std::uint64_t n, std::uint64_t seed,
                               const SampleOptions& options) {
  require(n >= 1, ErrorCode::invalid_argument, "shot count n must be at least 1");
  require(model.first_labels.size() == model.first_probabilities.size() &&
              model.conditional.size() == model.first_labels.size(),
          ErrorCode::dimension_mismatch, "inconsistent trajectory model");
  check_distribution(model.first_probabilities, options.normalization_tol);
  std::vector<std::vector<double>> branch_cdf;
  for (std::size_t w = 0; w < model.conditional.size(); ++w) {
    require(model.conditional[w].size() == model.second_labels.size(), ErrorCode::dimension_mismatch,
            "inconsistent trajectory model");
    if (model.first_probabilities[w] > 0.0) check_distribution(model.conditional[w], 1e-9);
    branch_cdf.push_back(cumulative(model.conditional[w]));
  }
  const std::vector<double> first_cdf = cumulative(model.first_probabilities);
  const std::size_t n2 = model.second_labels.size();
  const std::uint64_t key = stream_key(seed, options.descriptor);
  const unsigned workers = std::max(1u, options.threads);
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(first_cdf.size() * n2, 0));
  parallel_chunks(n, workers, [&](std::uint64_t begin, std::uint64_t end, unsigned slot) {
    auto& local = partial[slot];
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::size_t w = draw(first_cdf, counter_uniform(key, 2 * i));
      const std::size_t o = draw(branch_cdf[w], counter_uniform(key, 2 * i + 1));
      ++local[w * n2 + o];
    }
  });

  ShotRecord record{options.descriptor, seed, n, {}, std::vector<std::uint64_t>(first_cdf.size() * n2, 0)};
  for (double e1 : model.first_labels) {
    for (double eo : model.second_labels) record.labels.push_back({e1, eo});
  }
  for (const auto& local : partial) {
    for (std::size_t k = 0; k < local.size(); ++k) record.counts[k] += local[k];
  }
  return record;
}

// --- estimators -------------------------------------------------------------

EstimatorSpec nimp_estimator(const NimpRun& run) {
  run.validate();
  const double lambda = run.coupling.lambda;
  require(lambda != 0.0, ErrorCode::precondition, "lambda must be nonzero");
  const double s_alpha =
      expectation(ancilla_state(run.ancilla), axis_spin_operator(run.ancilla.zeta, run.ancilla.axis, SpinComponent::z))
          .real();
  require(std::abs(s_alpha) <= 1e-12, ErrorCode::precondition,
          "sampled estimates need an ancilla with <S^alpha> = 0");
  const cplx w = ancilla_prefactor(run.ancilla, run.coupling.variant);
  EstimatorSpec spec;
  spec.lambda = lambda;
  if (run.coupling.variant == 1) {
    spec.prefactor = -2.0 * lambda * w.real();
  } else {
    require(std::abs(w.real()) <= 1e-12, ErrorCode::precondition,
            "variant 2 needs a purely imaginary <B S^alpha> to isolate Re C");
    spec.prefactor = -2.0 * lambda * w.imag();
  }
  require(spec.prefactor != 0.0, ErrorCode::precondition, "ancilla prefactor <B S^alpha> vanishes");
  return spec;
}

EstimatorSpec simultaneous_estimator(const TwoAncillaRun& run, KeepAncilla part) {
  EstimatorSpec spec;
  spec.first = part == KeepAncilla::first ? 0 : 1;
  spec.second = 2;
  spec.prefactor = simultaneous_prefactor(run, part);
  spec.lambda = part == KeepAncilla::first ? run.lambda1 : run.lambda2;
  return spec;
}

EstimatorSpec ancilla_free_re_estimator() { return EstimatorSpec{}; }

namespace {

double product(const std::vector<double>& label, const EstimatorSpec& spec) {
  require(spec.first < label.size() && spec.second < label.size(), ErrorCode::dimension_mismatch,
          "estimator components exceed the outcome tuple");
  return label[spec.first] * label[spec.second];
}

}  // namespace

EstimateWithError estimate_from_shots(const ShotRecord& record, const EstimatorSpec& spec) {
  require(record.n > 0, ErrorCode::invalid_argument, "cannot estimate from n = 0 shots");
  require(record.labels.size() == record.counts.size(), ErrorCode::dimension_mismatch,
          "shot record labels and counts differ in length");
  require(record.total() == record.n, ErrorCode::invalid_argument, "shot counts do not sum to n");
  require(spec.prefactor != 0.0, ErrorCode::precondition, "estimator prefactor is zero");
  const double n = static_cast<double>(record.n);
  double mean = 0.0;
  double second_moment = 0.0;
  for (std::size_t k = 0; k < record.counts.size(); ++k) {
    const double g = product(record.labels[k], spec);
    const double f = static_cast<double>(record.counts[k]) / n;
    mean += f * g;
    second_moment += f * g * g;
  }
  EstimateWithError est;
  est.value = mean / spec.prefactor;
  est.std_error = std::sqrt(std::max(0.0, second_moment - mean * mean) / n) / std::abs(spec.prefactor);
  est.n = record.n;
  est.lambda = spec.lambda;
  return est;
}

double estimate_from_distribution(const std::vector<std::vector<double>>& labels,
                                  const std::vector<double>& probabilities, const EstimatorSpec& spec) {
  require(labels.size() == probabilities.size(), ErrorCode::dimension_mismatch,
          "labels and probabilities differ in length");
  double mean = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) mean += probabilities[k] * product(labels[k], spec);
  return mean / spec.prefactor;
}

double bootstrap_std_error(const ShotRecord& record, const EstimatorSpec& spec, std::size_t resamples,
                           std::uint64_t seed, unsigned threads) {
  require(record.n > 0, ErrorCode::invalid_argument, "cannot estimate from n = 0 shots");
  require(resamples >= 2, ErrorCode::invalid_argument, "bootstrap needs at least two resamples");
  std::vector<double> freq(record.counts.size());
  for (std::size_t k = 0; k < freq.size(); ++k) freq[k] = static_cast<double>(record.counts[k]) / record.n;
  std::vector<double> values(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    SampleOptions opts;
    opts.descriptor = record.descriptor + "/bootstrap/" + std::to_string(r);
    opts.threads = threads;
    values[r] = estimate_from_shots(sample(record.labels, freq, record.n, seed, opts), spec).value.real();
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / resamples;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(resamples - 1));
}

EstimateWithError sampled_correlation(const CorrelationTask& task, const AncillaSpec& ancilla, double lambda,
                                      const ComplexEstimateOptions& options) {
  double parts[2] = {0.0, 0.0};  // Im, Re
  double errors[2] = {0.0, 0.0};
  for (int variant = 1; variant <= 2; ++variant) {
    const NimpRun run{task, ancilla, CouplingSpec{variant, lambda, options.mode}, ReadoutTiming::deferred};
    const EstimatorSpec spec = nimp_estimator(run);
    const OutcomeDistribution dist = outcome_distribution(run);
    std::vector<std::vector<double>> labels;
    for (const auto& l : dist.labels) labels.push_back({l[0], l[1]});
    if (options.n == 0) {
      parts[variant - 1] = estimate_from_distribution(labels, dist.probabilities, spec);
      continue;
    }
    SampleOptions opts;
    opts.descriptor = "nimp/variant=" + std::to_string(variant) + "/lambda=" + format_double(lambda);
    opts.threads = options.threads;
    const ShotRecord record = sample(labels, dist.probabilities, options.n, options.seed, opts);
    const EstimateWithError est = estimate_from_shots(record, spec);
    parts[variant - 1] = est.value.real();
    errors[variant - 1] = options.error_method == ErrorMethod::delta
                              ? est.std_error
                              : bootstrap_std_error(record, spec, options.bootstrap_resamples, options.seed,
                                                    options.threads);
  }
  EstimateWithError out;
  out.value = cplx(parts[1], parts[0]);
  out.std_error = std::hypot(errors[0], errors[1]);
  out.n = options.n;
  out.lambda = lambda;
  return out;
}

bool LambdaScan::has_interior_minimum() const {
  if (rows.size() < 3 || argmin == 0 || argmin + 1 == rows.size()) return false;
  const double best = rows[argmin].abs_error;
  return best < rows.front().abs_error && best < rows.back().abs_error;
}

std::string LambdaScan::to_csv() const {
  std::ostringstream out;
  out << "lambda,abs_error,std_error,n,seed\r\n";
  for (const auto& r : rows) {
    out << format_double(r.lambda) << ',' << format_double(r.abs_error) << ',' << format_double(r.std_error)
        << ',' << r.n << ',' << r.seed << "\r\n";
  }
  return out.str();
}

LambdaScan lambda_scan(const CorrelationTask& task, const AncillaSpec& ancilla, const std::vector<double>& grid,
                       const ComplexEstimateOptions& options) {
  require(!grid.empty(), ErrorCode::invalid_argument, "lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(std::isfinite(grid[i]) && grid[i] > 0.0, ErrorCode::invalid_argument, "lambda grid must be positive");
    require(i == 0 || grid[i] > grid[i - 1], ErrorCode::invalid_argument, "lambda grid must be sorted ascending");
  }
  LambdaScan scan;
  scan.oracle = exact_correlation(task);
  for (double lambda : grid) {
    const EstimateWithError est = sampled_correlation(task, ancilla, lambda, options);
    scan.rows.push_back({lambda, std::abs(est.value - scan.oracle), est.std_error, options.n, options.seed,
                         est.value});
  }
  const auto best = std::min_element(scan.rows.begin(), scan.rows.end(),
                                     [](const auto& a, const auto& b) { return a.abs_error < b.abs_error; });
  scan.argmin = static_cast<std::size_t>(best - scan.rows.begin());
  return scan;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  require(lo > 0.0 && hi > lo && n >= 2, ErrorCode::invalid_argument, "log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> grid(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

}  // namespace nimp
