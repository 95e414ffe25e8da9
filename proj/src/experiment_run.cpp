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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nimp/experiment.hpp"
#include "nimp/povm.hpp"
#include "nimp/protocol.hpp"
#include "nimp/sampler.hpp"
#include "nimp/simultaneous.hpp"

#ifndef NIMP_VERSION
#define NIMP_VERSION "0.0.0"
#endif

namespace nimp {

using nlohmann::json;

std::string_view version() noexcept { return NIMP_VERSION; }

namespace {

constexpr Eigen::Index kMaxExportedKrausDim = 64;

json cj(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SpinComponent component(const std::string& axis) {
  if (axis == "x") return SpinComponent::x;
  if (axis == "y") return SpinComponent::y;
  return SpinComponent::z;
}

Axis to_axis(const std::string& axis) {
  if (axis == "x") return Axis::x;
  if (axis == "y") return Axis::y;
  return Axis::z;
}

Operator preset_hamiltonian(const ModelConfig& m, const ModelParams& p, const HilbertSpace& space) {
  const HalfInteger s = HalfInteger::from_double(m.spin);
  if (m.preset == "tfim") return build_hamiltonian(tfim_terms(m.sites, p.J, p.g, s, m.periodic), space);
  if (m.preset == "xxz") return build_hamiltonian(xxz_terms(m.sites, p.J, p.delta, p.h, s, m.periodic), space);
  return Operator::zero(space);
}

StateVector initial_state(const StateConfig& st, const HilbertSpace& space, HalfInteger s) {
  const int d = s.dim();
  if (st.kind == "basis") return StateVector::basis(space, static_cast<Eigen::Index>(st.index));
  Vector local_up = Vector::Zero(d);
  local_up(0) = 1.0;
  Vector local_down = Vector::Zero(d);
  local_down(d - 1) = 1.0;
  Vector local_coherent = Vector::Zero(d);
  if (st.kind == "coherent") {
    // sqrt(binom(2s, k)) cos^{2s-k}(theta/2) sin^k(theta/2) e^{i k phi}, k = s - m.
    const int n = s.twice();
    for (int k = 0; k < d; ++k) {
      const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
      local_coherent(k) = std::sqrt(binom) * std::pow(std::cos(0.5 * st.theta), n - k) *
                          std::pow(std::sin(0.5 * st.theta), k) * std::polar(1.0, k * st.phi);
    }
  }
  StateVector psi(HilbertSpace(), Vector::Ones(1));
  for (int i = 0; i < space.num_factors(); ++i) {
    const Vector& local = st.kind == "coherent" ? local_coherent : (st.kind == "neel" && i % 2 == 1 ? local_down : local_up);
    psi = kron(psi, StateVector(HilbertSpace({d}), local));
  }
  return psi.normalized_copy();
}

Operator observable(const ObservableConfig& o, const HilbertSpace& space, HalfInteger s) {
  if (o.kind == "spin") return embed(spin_operator(s, component(o.axis)), o.site, space);
  if (o.kind == "magnetization") {
    std::vector<int> sites = o.sites;
    if (sites.empty()) {
      for (int i = 0; i < space.num_factors(); ++i) sites.push_back(i);
    }
    Operator sum = Operator::zero(space);
    for (int site : sites) sum = sum + embed(spin_operator(s, component(o.axis)), site, space);
    return (1.0 / static_cast<double>(sites.size())) * sum;
  }
  Operator prod = Operator::identity(space);
  for (std::size_t i = 0; i < o.sites.size(); ++i) {
    prod = prod * embed(spin_operator(s, component(o.axes[i])), o.sites[i], space);
  }
  return prod;
}

std::string distribution_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& labels,
                             const std::vector<double>& probabilities) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << ",probability\r\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    for (double x : labels[k]) out << num(x) << ',';
    out << num(probabilities[k]) << "\r\n";
  }
  return out.str();
}

std::vector<std::vector<double>> as_rows(const OutcomeDistribution& d) {
  std::vector<std::vector<double>> rows;
  for (const auto& l : d.labels) rows.push_back({l[0], l[1]});
  return rows;
}

json estimate_json(const EstimateWithError& est) {
  return {{"value", est.value.imag() == 0.0 ? json(est.value.real()) : cj(est.value)},
          {"std_error", est.std_error},
          {"n", est.n}};
}

json matrix_json(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array();
    json ii = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"re", re}, {"im", im}};
}

struct Context {
  const ExperimentConfig& cfg;
  const ExecuteOptions& options;
  CorrelationTask task;
  ExperimentResult& out;

  AncillaSpec ancilla() const {
    return AncillaSpec::equal_superposition(HalfInteger::from_double(cfg.protocol.zeta), to_axis(cfg.protocol.axis));
  }
  CouplingMode mode() const { return cfg.protocol.mode == "linearized" ? CouplingMode::linearized : CouplingMode::exact; }
  ErrorMethod error_method() const {
    return cfg.protocol.error_method == "bootstrap" ? ErrorMethod::bootstrap : ErrorMethod::delta;
  }
  EstimateWithError with_error_method(const ShotRecord& record, const EstimatorSpec& spec) const {
    EstimateWithError est = estimate_from_shots(record, spec);
    if (error_method() == ErrorMethod::bootstrap) {
      est.std_error = bootstrap_std_error(record, spec, static_cast<std::size_t>(cfg.protocol.bootstrap_resamples),
                                          cfg.protocol.seed, options.threads);
    }
    return est;
  }
  SampleOptions sample_options(std::string descriptor) const {
    SampleOptions s;
    s.descriptor = std::move(descriptor);
    s.threads = options.threads;
    s.normalization_tol = cfg.tolerances.normalization;
    return s;
  }
  void table(const std::string& name, std::string csv) {
    if (cfg.output.tables) out.tables[name] = std::move(csv);
  }
};

// Each runner fills "result" and returns the quantity to compare with the
// oracle: kind "complex", "re" or "im", or none.
struct Comparable {
  std::string part;  ///< "", "complex", "re", "im"
  cplx value{0.0, 0.0};
  bool exact = false;  ///< expected to match the oracle to tolerance
};

Comparable run_oracle(Context& ctx, json& result) {
  const cplx c = exact_correlation(ctx.task);
  result["correlation"] = cj(c);
  return {"complex", c, true};
}

Comparable run_nimp(Context& ctx, json& result) {
  const ProtocolConfig& p = ctx.cfg.protocol;
  const AncillaSpec ancilla = ctx.ancilla();
  const ReadoutTiming timing = p.readout == "immediate" ? ReadoutTiming::immediate : ReadoutTiming::deferred;
  std::vector<int> variants = p.variant == 0 ? std::vector<int>{1, 2} : std::vector<int>{p.variant};
  double weighted[3] = {0.0, 0.0, 0.0};
  double sampled_value[3] = {0.0, 0.0, 0.0};
  double sampled_error[3] = {0.0, 0.0, 0.0};
  json per_variant = json::array();
  for (int v : variants) {
    const NimpRun run{ctx.task, ancilla, CouplingSpec{v, p.lambda, ctx.mode()}, timing};
    const OutcomeDistribution dist = outcome_distribution(run);
    weighted[v] = weighted_correlation(dist);
    json entry{{"variant", v},
               {"weighted_correlation", weighted[v]},
               {"prefactor", cj(ancilla_prefactor(ancilla, v))},
               {"total_probability", dist.total()},
               {"min_raw_probability", dist.min_raw_probability},
               {"positivity_violated", dist.positivity_violated}};
    const EstimatorSpec spec = nimp_estimator(run);
    entry[v == 1 ? "im_estimate" : "re_estimate"] = weighted[v] / spec.prefactor;
    if (p.n > 0) {
      const ShotRecord record = sample(as_rows(dist), dist.probabilities, p.n, p.seed,
                                       ctx.sample_options("nimp/variant=" + std::to_string(v) + "/lambda=" + num(p.lambda)));
      const EstimateWithError est = ctx.with_error_method(record, spec);
      sampled_value[v] = est.value.real();
      sampled_error[v] = est.std_error;
      entry["sampled"] = estimate_json(est);
    }
    per_variant.push_back(entry);
    ctx.table("distribution_variant" + std::to_string(v), distribution_csv({"m", "e"}, as_rows(dist), dist.probabilities));
  }
  result["variants"] = per_variant;
  if (variants.size() == 2) {
    const cplx c = reconstruct_general(weighted[1], weighted[2], p.lambda, ancilla_prefactor(ancilla, 1),
                                       ancilla_prefactor(ancilla, 2));
    result["estimate"] = cj(c);
    if (p.n > 0) {
      result["sampled_estimate"] = {{"value", cj(cplx(sampled_value[2], sampled_value[1]))},
                                    {"std_error", std::hypot(sampled_error[1], sampled_error[2])},
                                    {"n", p.n}};
    }
    return {"complex", c, false};
  }
  const EstimatorSpec spec =
      nimp_estimator(NimpRun{ctx.task, ancilla, CouplingSpec{p.variant, p.lambda, ctx.mode()}, timing});
  const double part = weighted[p.variant] / spec.prefactor;
  return p.variant == 1 ? Comparable{"im", cplx(0.0, part), false} : Comparable{"re", cplx(part, 0.0), false};
}

Comparable run_simul(Context& ctx, json& result) {
  const ProtocolConfig& p = ctx.cfg.protocol;
  const TwoAncillaRun run = TwoAncillaRun::standard(ctx.task, p.lambda, p.lambda2);
  const ThreeWayDistribution dist = two_ancilla_distribution(run);
  const SimultaneousEstimate est = simultaneous_estimate(run, dist);
  result["im_estimate"] = est.im_est;
  result["re_estimate"] = est.re_est;
  result["weighted1"] = est.weighted1;
  result["weighted2"] = est.weighted2;
  result["total_probability"] = dist.total();
  std::vector<std::vector<double>> rows;
  for (const auto& l : dist.labels) rows.push_back({l[0], l[1], l[2]});
  ctx.table("distribution_simul", distribution_csv({"m1", "m2", "e"}, rows, dist.probabilities));
  if (p.n > 0) {
    const ShotRecord record = sample(rows, dist.probabilities, p.n, p.seed,
                                     ctx.sample_options("simul/lambda=" + num(p.lambda) + "/lambda2=" + num(p.lambda2)));
    result["sampled"] = {{"im", estimate_json(estimate_from_shots(record, simultaneous_estimator(run, KeepAncilla::first)))},
                         {"re", estimate_json(estimate_from_shots(record, simultaneous_estimator(run, KeepAncilla::second)))}};
  }
  return {"complex", cplx(est.re_est, est.im_est), false};
}

Comparable run_ancilla_free_im(Context& ctx, json& result) {
  const double v = ancilla_free_im(ctx.task, ctx.cfg.protocol.theta);
  result["value"] = v;
  result["theta"] = ctx.cfg.protocol.theta;
  return {"im", cplx(0.0, v), true};
}

Comparable run_ancilla_free_re(Context& ctx, json& result) {
  const ProtocolConfig& p = ctx.cfg.protocol;
  const double v = ancilla_free_re(ctx.task);
  result["value"] = v;
  const OutcomeDistribution dist = projective_pair_distribution(ctx.task);
  ctx.table("distribution_projective", distribution_csv({"e1", "e2"}, as_rows(dist), dist.probabilities));
  if (p.n > 0) {
    ShotRecord record;
    if (p.sampling == "trajectory") {
      record = sample_trajectories(projective_trajectory_model(ctx.task), p.n, p.seed,
                                   ctx.sample_options("ancilla-free-re/trajectory"));
    } else {
      record = sample(as_rows(dist), dist.probabilities, p.n, p.seed, ctx.sample_options("ancilla-free-re/distribution"));
    }
    json s = estimate_json(estimate_from_shots(record, ancilla_free_re_estimator()));
    s["sampling"] = p.sampling;
    result["sampled"] = s;
  }
  return {"re", cplx(v, 0.0), true};
}

Comparable run_povm_check(Context& ctx, json& result) {
  const ProtocolConfig& p = ctx.cfg.protocol;
  const ToleranceConfig& tol = ctx.cfg.tolerances;
  const AncillaSpec ancilla = ctx.ancilla();
  const StateVector psi1 = evolve(ctx.task.psi0, ctx.task.schedule, ctx.task.t1);
  const std::vector<int> variants = p.variant == 0 ? std::vector<int>{1, 2} : std::vector<int>{p.variant};
  double completeness = 0.0;
  double equivalence = 0.0;
  double closed_form = 0.0;
  json entries = json::array();
  for (int v : variants) {
    const KrausSet ks = kraus_set(ancilla, v, p.lambda, ctx.task.o1);
    const double comp = ks.completeness_residual();
    const Operator b = coupling_generator(v, ancilla.zeta, ancilla.axis);
    const Matrix frame = ancilla_frame(ancilla.zeta, ancilla.axis);
    const auto branches = joint_branches(b, ancilla_state(ancilla), p.lambda, ctx.task.o1, frame, psi1);
    double eq = povm_equivalence_residual(ks, branches, psi1);

    // Probabilities against the full protocol with immediate readout,
    // marginalized over the target outcome.
    const NimpRun run{ctx.task, ancilla, CouplingSpec{v, p.lambda, CouplingMode::exact}, ReadoutTiming::immediate};
    const OutcomeDistribution dist = outcome_distribution(run);
    const auto measured = apply_measurement(psi1, ks, tol.completeness);
    for (std::size_t m = 0; m < ks.size(); ++m) {
      double marginal = 0.0;
      for (std::size_t k = 0; k < dist.labels.size(); ++k) {
        if (dist.labels[k][0] == ks.labels[m]) marginal += dist.probabilities[k];
      }
      eq = std::max(eq, std::abs(marginal - measured[m].probability));
    }

    json entry{{"variant", v}, {"completeness_residual", comp}, {"equivalence_residual", eq}};
    if (ancilla.zeta.twice() == 1) {
      const KrausSet closed = v == 1 ? kraus_closed_form_im(0.0, 0.0, p.lambda, ctx.task.o1)
                                     : kraus_closed_form_re(p.lambda, ctx.task.o1);
      double r = 0.0;
      for (std::size_t m = 0; m < ks.size(); ++m) r = std::max(r, max_abs_diff(ks.operators[m], closed.operators[m]));
      entry["closed_form_residual"] = r;
      closed_form = std::max(closed_form, r);
      if (v == 2) {
        try {
          const double e = two_point_spectrum(ctx.task.o1);
          const KrausSet at_point = kraus_set(ancilla, 2, std::numbers::pi / (2.0 * e), ctx.task.o1);
          const KrausSet projectors = kraus_re_projective_point(ctx.task.o1);
          double pr = 0.0;
          for (std::size_t m = 0; m < 2; ++m) {
            pr = std::max(pr, max_abs_diff(at_point.operators[m], projectors.operators[m]));
          }
          entry["projective_point_residual"] = pr;
        } catch (const Error&) {
          entry["projective_point_residual"] = nullptr;  // O1 lacks a two-point spectrum
        }
      }
    }
    if (ctx.task.o1.dim() <= kMaxExportedKrausDim) {
      json ops = json::array();
      for (std::size_t m = 0; m < ks.size(); ++m) {
        json op = matrix_json(ks.operators[m]);
        op["label"] = ks.labels[m];
        ops.push_back(op);
      }
      entry["kraus_operators"] = ops;
    }
    completeness = std::max(completeness, comp);
    equivalence = std::max(equivalence, eq);
    entries.push_back(entry);
  }
  result["variants"] = entries;
  result["completeness_residual"] = completeness;
  result["equivalence_residual"] = equivalence;
  result["passed"] = completeness < tol.completeness && equivalence < tol.equivalence;
  if (ancilla.zeta.twice() == 1) result["closed_form_residual"] = closed_form;
  return {};
}

Comparable run_lambda_scan(Context& ctx, json& result) {
  const ProtocolConfig& p = ctx.cfg.protocol;
  const std::vector<double> grid =
      p.grid.values.empty() ? log_grid(p.grid.lo, p.grid.hi, static_cast<std::size_t>(p.grid.points)) : p.grid.values;
  ComplexEstimateOptions opts;
  opts.n = p.n;
  opts.seed = p.seed;
  opts.threads = ctx.options.threads;
  opts.error_method = ctx.error_method();
  opts.bootstrap_resamples = static_cast<std::size_t>(p.bootstrap_resamples);
  opts.mode = ctx.mode();
  const LambdaScan scan = lambda_scan(ctx.task, ctx.ancilla(), grid, opts);
  json rows = json::array();
  for (const auto& r : scan.rows) {
    rows.push_back({{"lambda", r.lambda}, {"abs_error", r.abs_error}, {"std_error", r.std_error}, {"estimate", cj(r.estimate)}});
  }
  result["rows"] = rows;
  result["oracle"] = cj(scan.oracle);
  result["argmin_lambda"] = scan.rows[scan.argmin].lambda;
  result["interior_minimum"] = scan.has_interior_minimum();
  ctx.out.tables["lambda_scan"] = scan.to_csv();  // the scan's primary output, always written
  return {};
}

}  // namespace

CorrelationTask build_task(const ExperimentConfig& config) {
  validate_config(config);
  const ModelConfig& m = config.model;
  const HalfInteger s = HalfInteger::from_double(m.spin);
  const HilbertSpace space = HilbertSpace::spins(m.sites, s);
  std::vector<Schedule::Segment> segments;
  if (m.segments.empty()) {
    segments.push_back({0.0, preset_hamiltonian(m, m.params, space)});
  } else {
    for (const auto& seg : m.segments) segments.push_back({seg.duration, preset_hamiltonian(m, seg.params, space)});
  }
  const TaskConfig& t = config.task;
  return CorrelationTask{initial_state(t.initial_state, space, s),
                         observable(t.o1, space, s),
                         t.t1,
                         observable(t.o2, space, s),
                         t.t2,
                         Schedule(std::move(segments))};
}

json ExperimentResult::document() const {
  json doc = payload;
  doc["timing"] = {{"wall_time_seconds", wall_time_seconds}};
  return doc;
}

ExperimentResult execute(const ExperimentConfig& config, const ExecuteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  Context ctx{config, options, build_task(config), out};
  const ProtocolConfig& p = config.protocol;

  json result = json::object();
  Comparable cmp;
  if (p.name == "oracle") cmp = run_oracle(ctx, result);
  else if (p.name == "nimp") cmp = run_nimp(ctx, result);
  else if (p.name == "simul") cmp = run_simul(ctx, result);
  else if (p.name == "ancilla-free-im") cmp = run_ancilla_free_im(ctx, result);
  else if (p.name == "ancilla-free-re") cmp = run_ancilla_free_re(ctx, result);
  else if (p.name == "povm-check") cmp = run_povm_check(ctx, result);
  else cmp = run_lambda_scan(ctx, result);

  json& doc = out.payload;
  doc["version"] = std::string(version());
  doc["protocol"] = p.name;
  doc["config"] = config_to_json(config);
  const bool uses_lambda = p.name == "nimp" || p.name == "simul" || p.name == "povm-check";
  doc["metadata"] = {{"seed", p.seed},
                     {"n", p.n},
                     {"lambda", uses_lambda ? json(p.lambda) : json(nullptr)},
                     {"version", std::string(version())}};
  doc["result"] = result;
  if (config.compare_oracle || p.name == "oracle") {
    const cplx oracle = p.name == "oracle" ? cmp.value : exact_correlation(ctx.task);
    doc["oracle"] = {{"correlation", cj(oracle)}};
    if (!cmp.part.empty() && p.name != "oracle") {
      double err = 0.0;
      if (cmp.part == "complex") err = std::abs(cmp.value - oracle);
      if (cmp.part == "re") err = std::abs(cmp.value.real() - oracle.real());
      if (cmp.part == "im") err = std::abs(cmp.value.imag() - oracle.imag());
      json comparison{{"part", cmp.part}, {"abs_error", err}};
      if (cmp.exact) comparison["within_tolerance"] = err <= config.tolerances.oracle;
      doc["comparison"] = comparison;
    }
  }
  out.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_outputs(const ExperimentResult& result, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  require(!ec, ErrorCode::io, "cannot create output directory '" + directory + "': " + ec.message());
  auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorCode::io, "cannot open '" + path.string() + "' for writing");
    f << text;
    require(static_cast<bool>(f), ErrorCode::io, "failed writing '" + path.string() + "'");
  };
  write(fs::path(directory) / "result.json", result.document().dump(2) + "\n");
  for (const auto& [name, csv] : result.tables) write(fs::path(directory) / (name + ".csv"), csv);
}

json error_json(const std::exception& error) {
  json body;
  if (const auto* cfg = dynamic_cast<const ConfigError*>(&error)) {
    body = {{"code", std::string(to_string(cfg->code()))}, {"message", cfg->what()}, {"violations", cfg->violations()}};
  } else if (const auto* e = dynamic_cast<const Error*>(&error)) {
    body = {{"code", std::string(to_string(e->code()))}, {"message", e->what()}};
  } else {
    body = {{"code", "internal"}, {"message", error.what()}};
  }
  return {{"error", body}};
}

}  // namespace nimp
