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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nimp/experiment.hpp"

namespace nimp {

using nlohmann::json;

namespace {

constexpr double kMaxZeta = 10.0;
constexpr long long kMaxTargetDim = 4096;

const std::vector<std::string> kProtocols = {"oracle",         "nimp",          "simul",     "ancilla-free-im",
                                             "ancilla-free-re", "povm-check", "lambda-scan"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

class Collector {
 public:
  void error(const std::string& path, const std::string& message) { violations.push_back(path + ": " + message); }
  void dimension(const std::string& path, const std::string& message) {
    error(path, message);
    has_dimension_error = true;
  }
  [[noreturn]] void raise() const {
    throw ConfigError(has_dimension_error ? ErrorCode::dimension_mismatch : ErrorCode::schema, violations);
  }

  std::vector<std::string> violations;
  bool has_dimension_error = false;
};

bool is_half_integer(double x) { return std::isfinite(x) && std::abs(2.0 * x - std::round(2.0 * x)) < 1e-12; }

// --- typed readers -----------------------------------------------------------

class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, Collector& c) : obj_(obj), path_(std::move(path)), c_(c) {}

  bool ok() const { return obj_.is_object(); }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const { return ok() && obj_.contains(key); }
  const json& raw(const std::string& key) const { return obj_.at(key); }

  void allow(std::initializer_list<std::string> keys) {
    std::set<std::string> allowed(keys);
    if (!ok()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!allowed.count(key)) c_.error(at(key), "unknown key");
    }
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) return c_.error(at(key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) c_.error(at(key), "must be finite");
  }
  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) return c_.error(at(key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      return c_.error(at(key), "integer out of range");
    }
    out = static_cast<int>(x);
  }
  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    // Documents built in code store small literals as signed integers.
    const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    if (!ok) return c_.error(at(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) return c_.error(at(key), "expected true or false");
    out = v.get<bool>();
  }
  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) return c_.error(at(key), "expected a string");
    out = v.get<std::string>();
  }
  void integers(const std::string& key, std::vector<int>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) return c_.error(at(key), "expected an array of integers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) return c_.error(at(key) + "/" + std::to_string(i), "expected an integer");
      const auto x = v[i].get<long long>();
      out.push_back(static_cast<int>(std::clamp<long long>(x, -1, std::numeric_limits<int>::max())));
    }
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) return c_.error(at(key), "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) return c_.error(at(key) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
  }
  void strings(const std::string& key, std::vector<std::string>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) return c_.error(at(key), "expected an array of strings");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) return c_.error(at(key) + "/" + std::to_string(i), "expected a string");
      out.push_back(v[i].get<std::string>());
    }
  }
  /// Returns a reader for a nested object, or an invalid one if absent or mistyped.
  ObjectReader child(const std::string& key) {
    static const json kNull;
    if (!has(key)) return ObjectReader(kNull, at(key), c_);
    const json& v = obj_.at(key);
    if (!v.is_object()) c_.error(at(key), "expected an object");
    return ObjectReader(v, at(key), c_);
  }
  Collector& collector() { return c_; }

 private:
  const json& obj_;
  std::string path_;
  Collector& c_;
};

// --- structural parsing -------------------------------------------------------

std::vector<std::string> preset_param_keys(const std::string& preset) {
  if (preset == "tfim") return {"J", "g"};
  if (preset == "xxz") return {"J", "delta", "h"};
  return {};
}

void read_params(ObjectReader& r, const std::string& preset, ModelParams& p) {
  r.number("J", p.J);
  if (preset == "tfim") r.number("g", p.g);
  if (preset == "xxz") {
    r.number("delta", p.delta);
    r.number("h", p.h);
  }
}

void check_allowed(const json& obj, const std::string& path, const std::set<std::string>& allowed, Collector& c) {
  if (!obj.is_object()) return;
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) c.error(path + "/" + key, "unknown key");
  }
}

ModelConfig read_model(const json& doc, Collector& c) {
  ModelConfig m;
  if (!doc.contains("model")) {
    c.error("/model", "required");
    return m;
  }
  const json& obj = doc.at("model");
  ObjectReader r(obj, "/model", c);
  if (!r.ok()) {
    c.error("/model", "expected an object");
    return m;
  }
  r.string("preset", m.preset);
  if (!r.has("preset")) c.error("/model/preset", "required");
  if (m.preset != "tfim" && m.preset != "xxz" && m.preset != "zero") {
    c.error("/model/preset", "unknown preset '" + m.preset + "' (expected tfim, xxz or zero)");
  }
  if (!r.has("sites")) c.error("/model/sites", "required");
  r.integer("sites", m.sites);
  r.number("spin", m.spin);
  r.boolean("periodic", m.periodic);
  read_params(r, m.preset, m.params);

  std::set<std::string> allowed = {"preset", "sites", "spin", "periodic", "segments"};
  for (const auto& k : preset_param_keys(m.preset)) allowed.insert(k);
  check_allowed(obj, "/model", allowed, c);

  if (r.has("segments")) {
    const json& segs = obj.at("segments");
    if (!segs.is_array() || segs.empty()) {
      c.error("/model/segments", "expected a non-empty array");
    } else {
      std::set<std::string> seg_allowed = {"duration"};
      for (const auto& k : preset_param_keys(m.preset)) seg_allowed.insert(k);
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string path = "/model/segments/" + std::to_string(i);
        ObjectReader sr(segs[i], path, c);
        if (!sr.ok()) {
          c.error(path, "expected an object");
          continue;
        }
        SegmentConfig seg;
        seg.params = m.params;  // unspecified parameters inherit the model's
        if (!sr.has("duration")) c.error(path + "/duration", "required");
        sr.number("duration", seg.duration);
        read_params(sr, m.preset, seg.params);
        check_allowed(segs[i], path, seg_allowed, c);
        m.segments.push_back(seg);
      }
    }
  }
  return m;
}

void read_state(ObjectReader r, StateConfig& s) {
  if (!r.ok()) return;
  r.string("kind", s.kind);
  Collector& c = r.collector();
  if (s.kind == "all_up" || s.kind == "neel") {
    r.allow({"kind"});
  } else if (s.kind == "basis") {
    r.allow({"kind", "index"});
    if (!r.has("index")) c.error(r.at("index"), "required for kind=basis");
    r.unsigned_integer("index", s.index);
  } else if (s.kind == "coherent") {
    r.allow({"kind", "theta", "phi"});
    r.number("theta", s.theta);
    r.number("phi", s.phi);
  } else {
    c.error(r.at("kind"), "unknown state kind '" + s.kind + "' (expected all_up, neel, basis or coherent)");
  }
}

void read_observable(ObjectReader r, ObservableConfig& o) {
  if (!r.ok()) return;
  r.string("kind", o.kind);
  Collector& c = r.collector();
  if (o.kind == "spin") {
    r.allow({"kind", "axis", "site"});
    r.string("axis", o.axis);
    r.integer("site", o.site);
  } else if (o.kind == "magnetization") {
    r.allow({"kind", "axis", "sites"});
    r.string("axis", o.axis);
    r.integers("sites", o.sites);
  } else if (o.kind == "product") {
    r.allow({"kind", "sites", "axes"});
    if (!r.has("sites")) c.error(r.at("sites"), "required for kind=product");
    if (!r.has("axes")) c.error(r.at("axes"), "required for kind=product");
    r.integers("sites", o.sites);
    r.strings("axes", o.axes);
  } else {
    c.error(r.at("kind"), "unknown observable kind '" + o.kind + "' (expected spin, magnetization or product)");
  }
}

TaskConfig read_task(const json& doc, Collector& c) {
  TaskConfig t;
  ObjectReader r(doc, "", c);
  ObjectReader tr = r.child("task");
  if (!tr.ok()) return t;
  tr.allow({"initial_state", "o1", "o2", "t1", "t2"});
  read_state(tr.child("initial_state"), t.initial_state);
  read_observable(tr.child("o1"), t.o1);
  read_observable(tr.child("o2"), t.o2);
  tr.number("t1", t.t1);
  tr.number("t2", t.t2);
  return t;
}

std::set<std::string> protocol_keys(const std::string& name) {
  if (name == "oracle") return {"name"};
  if (name == "nimp") {
    return {"name", "lambda", "zeta", "axis", "variant", "mode", "readout", "n", "seed", "error_method",
            "bootstrap_resamples"};
  }
  if (name == "simul") return {"name", "lambda", "lambda2", "n", "seed"};
  if (name == "ancilla-free-im") return {"name", "theta"};
  if (name == "ancilla-free-re") return {"name", "n", "seed", "sampling"};
  if (name == "povm-check") return {"name", "lambda", "zeta", "axis", "variant"};
  if (name == "lambda-scan") {
    return {"name", "zeta", "axis", "mode", "n", "seed", "grid", "error_method", "bootstrap_resamples"};
  }
  return {"name"};
}

ProtocolConfig read_protocol(const json& doc, Collector& c) {
  ProtocolConfig p;
  ObjectReader r(doc, "", c);
  ObjectReader pr = r.child("protocol");
  if (!pr.ok()) return p;
  pr.string("name", p.name);
  if (std::find(kProtocols.begin(), kProtocols.end(), p.name) == kProtocols.end()) {
    c.error("/protocol/name", "unknown protocol '" + p.name + "'");
    return p;
  }
  check_allowed(doc.at("protocol"), "/protocol", protocol_keys(p.name), c);
  pr.number("lambda", p.lambda);
  pr.number("lambda2", p.lambda2);
  pr.number("zeta", p.zeta);
  pr.string("axis", p.axis);
  if (pr.has("variant")) {
    const json& v = pr.raw("variant");
    if (v.is_string() && v.get<std::string>() == "both") {
      p.variant = 0;
    } else if (v.is_number_integer() && (v.get<long long>() == 1 || v.get<long long>() == 2)) {
      p.variant = v.get<int>();
    } else {
      c.error("/protocol/variant", "expected 1, 2 or \"both\"");
    }
  }
  pr.string("mode", p.mode);
  pr.string("readout", p.readout);
  pr.unsigned_integer("n", p.n);
  pr.unsigned_integer("seed", p.seed);
  pr.number("theta", p.theta);
  pr.string("sampling", p.sampling);
  pr.string("error_method", p.error_method);
  pr.integer("bootstrap_resamples", p.bootstrap_resamples);
  if (pr.has("grid")) {
    ObjectReader gr = pr.child("grid");
    if (gr.ok()) {
      gr.allow({"lo", "hi", "points", "values"});
      if (gr.has("values") && (gr.has("lo") || gr.has("hi") || gr.has("points"))) {
        c.error("/protocol/grid", "give either values or lo/hi/points, not both");
      }
      gr.number("lo", p.grid.lo);
      gr.number("hi", p.grid.hi);
      gr.integer("points", p.grid.points);
      gr.numbers("values", p.grid.values);
    }
  }
  return p;
}

// --- semantic checks ----------------------------------------------------------

bool valid_axis(const std::string& a) { return a == "x" || a == "y" || a == "z"; }

void check_observable(const ObservableConfig& o, const std::string& path, int sites, Collector& c) {
  auto check_site = [&](int s, const std::string& field) {
    if (s < 0 || s >= sites) {
      c.dimension(field, "site index " + std::to_string(s) + " out of range for a lattice of " +
                             std::to_string(sites) + " sites");
    }
  };
  if (o.kind == "spin") {
    if (!valid_axis(o.axis)) c.error(path + "/axis", "expected x, y or z");
    check_site(o.site, path + "/site");
  } else if (o.kind == "magnetization") {
    if (!valid_axis(o.axis)) c.error(path + "/axis", "expected x, y or z");
    for (std::size_t i = 0; i < o.sites.size(); ++i) check_site(o.sites[i], path + "/sites/" + std::to_string(i));
    if (std::set<int>(o.sites.begin(), o.sites.end()).size() != o.sites.size()) {
      c.error(path + "/sites", "sites must be distinct");
    }
  } else if (o.kind == "product") {
    if (o.sites.empty()) c.error(path + "/sites", "must not be empty");
    if (o.sites.size() != o.axes.size()) {
      c.dimension(path + "/axes", "needs one axis per site (" + std::to_string(o.sites.size()) + ")");
    }
    for (std::size_t i = 0; i < o.sites.size(); ++i) check_site(o.sites[i], path + "/sites/" + std::to_string(i));
    for (std::size_t i = 0; i < o.axes.size(); ++i) {
      if (!valid_axis(o.axes[i])) c.error(path + "/axes/" + std::to_string(i), "expected x, y or z");
    }
    if (std::set<int>(o.sites.begin(), o.sites.end()).size() != o.sites.size()) {
      c.error(path + "/sites", "sites must be distinct");
    }
  }
}

void check_zeta_axis(const ProtocolConfig& p, Collector& c) {
  if (!is_half_integer(p.zeta) || p.zeta <= 0.0 || p.zeta > kMaxZeta) {
    c.error("/protocol/zeta", "expected a positive half-integer no larger than 10");
  }
  if (!valid_axis(p.axis)) c.error("/protocol/axis", "expected x, y or z");
}

void check_error_method(const ProtocolConfig& p, Collector& c) {
  if (p.error_method != "delta" && p.error_method != "bootstrap") {
    c.error("/protocol/error_method", "expected delta or bootstrap");
  }
  if (p.bootstrap_resamples < 2) c.error("/protocol/bootstrap_resamples", "must be at least 2");
}

void check_mode(const ProtocolConfig& p, Collector& c) {
  if (p.mode != "exact" && p.mode != "linearized") c.error("/protocol/mode", "expected exact or linearized");
  if (p.mode == "linearized" && p.n > 0) {
    c.error("/protocol/mode", "sampling (n > 0) needs mode=exact; linearized probabilities are not normalized");
  }
}

void semantic_checks(const ExperimentConfig& cfg, Collector& c) {
  if (cfg.schema_version != kSchemaVersion) {
    c.error("/schema_version", "unsupported schema version " + std::to_string(cfg.schema_version) +
                                   " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  const ModelConfig& m = cfg.model;
  if (m.preset != "tfim" && m.preset != "xxz" && m.preset != "zero") c.error("/model/preset", "unknown preset");
  const bool spin_ok = is_half_integer(m.spin) && m.spin > 0.0;
  if (!spin_ok) c.error("/model/spin", "expected a positive half-integer");
  if (m.sites < 1) {
    c.dimension("/model/sites", "need at least one site");
    return;
  }
  if (spin_ok) {
    const long long local = std::llround(2.0 * m.spin) + 1;
    long long dim = 1;
    for (int i = 0; i < m.sites && dim <= kMaxTargetDim; ++i) dim *= local;
    if (dim > kMaxTargetDim) {
      c.dimension("/model/sites", "Hilbert space dimension exceeds " + std::to_string(kMaxTargetDim));
      return;
    }
    if (cfg.task.initial_state.kind == "basis" && cfg.task.initial_state.index >= static_cast<std::uint64_t>(dim)) {
      c.dimension("/task/initial_state/index",
                  "basis index " + std::to_string(cfg.task.initial_state.index) + " out of range for dimension " +
                      std::to_string(dim));
    }
  }
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    if (!(m.segments[i].duration > 0.0)) {
      c.error("/model/segments/" + std::to_string(i) + "/duration", "must be positive");
    }
  }

  const TaskConfig& t = cfg.task;
  check_observable(t.o1, "/task/o1", m.sites, c);
  check_observable(t.o2, "/task/o2", m.sites, c);
  if (t.t1 < 0.0) c.error("/task/t1", "must be non-negative");
  if (t.t2 < 0.0) c.error("/task/t2", "must be non-negative");
  const ProtocolConfig& p = cfg.protocol;
  if (p.name != "oracle" && t.t1 > t.t2) c.error("/task/t2", "protocols need t1 <= t2");

  if (p.name == "nimp") {
    if (p.lambda == 0.0) c.error("/protocol/lambda", "λ must be nonzero");
    check_zeta_axis(p, c);
    check_mode(p, c);
    if (p.readout != "deferred" && p.readout != "immediate") {
      c.error("/protocol/readout", "expected deferred or immediate");
    }
    check_error_method(p, c);
  } else if (p.name == "simul") {
    if (p.lambda == 0.0) c.error("/protocol/lambda", "λ must be nonzero");
    if (p.lambda2 == 0.0) c.error("/protocol/lambda2", "λ must be nonzero");
  } else if (p.name == "ancilla-free-im") {
    if (p.theta == 0.0 || std::abs(std::sin(p.theta)) < 1e-12) {
      c.error("/protocol/theta", "θ must be nonzero and not a multiple of π");
    }
  } else if (p.name == "ancilla-free-re") {
    if (p.sampling != "distribution" && p.sampling != "trajectory") {
      c.error("/protocol/sampling", "expected distribution or trajectory");
    }
  } else if (p.name == "povm-check") {
    check_zeta_axis(p, c);
  } else if (p.name == "lambda-scan") {
    check_zeta_axis(p, c);
    check_mode(p, c);
    check_error_method(p, c);
    if (!p.grid.values.empty()) {
      for (std::size_t i = 0; i < p.grid.values.size(); ++i) {
        const double v = p.grid.values[i];
        if (!(std::isfinite(v) && v > 0.0)) {
          c.error("/protocol/grid/values/" + std::to_string(i), "λ values must be positive");
        } else if (i > 0 && !(v > p.grid.values[i - 1])) {
          c.error("/protocol/grid/values/" + std::to_string(i), "λ values must be strictly increasing");
        }
      }
    } else {
      if (!(p.grid.lo > 0.0 && p.grid.hi > p.grid.lo)) c.error("/protocol/grid", "need 0 < lo < hi");
      if (p.grid.points < 2) c.error("/protocol/grid/points", "need at least 2 points");
    }
  }

  const ToleranceConfig& tol = cfg.tolerances;
  for (const auto& [name, value] : {std::pair{"normalization", tol.normalization},
                                    std::pair{"completeness", tol.completeness},
                                    std::pair{"equivalence", tol.equivalence}, std::pair{"oracle", tol.oracle}}) {
    if (!(std::isfinite(value) && value > 0.0)) c.error(std::string("/tolerances/") + name, "must be positive");
  }
  if (cfg.output.directory.empty()) c.error("/output/directory", "must not be empty");
}

// Position of a parse error as (line, column), both 1-based.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ConfigError::ConfigError(ErrorCode code, std::vector<std::string> violations)
    : Error(code, join(violations)), violations_(std::move(violations)) {}

ExperimentConfig config_from_json(const json& doc) {
  Collector c;
  ExperimentConfig cfg;
  if (!doc.is_object()) {
    c.error("", "config must be a JSON object");
    c.raise();
  }
  check_allowed(doc, "", {"schema_version", "model", "task", "protocol", "compare_oracle", "tolerances", "output"},
                c);
  ObjectReader r(doc, "", c);
  r.integer("schema_version", cfg.schema_version);
  cfg.model = read_model(doc, c);
  cfg.task = read_task(doc, c);
  cfg.protocol = read_protocol(doc, c);
  r.boolean("compare_oracle", cfg.compare_oracle);
  ObjectReader tr = r.child("tolerances");
  if (tr.ok()) {
    tr.allow({"normalization", "completeness", "equivalence", "oracle"});
    tr.number("normalization", cfg.tolerances.normalization);
    tr.number("completeness", cfg.tolerances.completeness);
    tr.number("equivalence", cfg.tolerances.equivalence);
    tr.number("oracle", cfg.tolerances.oracle);
  }
  ObjectReader orr = r.child("output");
  if (orr.ok()) {
    orr.allow({"directory", "tables"});
    orr.string("directory", cfg.output.directory);
    orr.boolean("tables", cfg.output.tables);
  }
  if (!c.violations.empty()) c.raise();
  semantic_checks(cfg, c);
  if (!c.violations.empty()) c.raise();
  return cfg;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError(ErrorCode::parse, {"syntax error at line " + std::to_string(line) + ", column " +
                                         std::to_string(col) + " (byte " + std::to_string(e.byte) +
                                         "): " + e.what()});
  }
  return config_from_json(doc);
}

void validate_config(const ExperimentConfig& config) {
  Collector c;
  semantic_checks(config, c);
  if (!c.violations.empty()) c.raise();
}

namespace {

json params_to_json(const std::string& preset, const ModelParams& p) {
  json out = json::object();
  if (preset == "tfim") {
    out["J"] = p.J;
    out["g"] = p.g;
  } else if (preset == "xxz") {
    out["J"] = p.J;
    out["delta"] = p.delta;
    out["h"] = p.h;
  }
  return out;
}

json observable_to_json(const ObservableConfig& o) {
  json out{{"kind", o.kind}};
  if (o.kind == "spin") {
    out["axis"] = o.axis;
    out["site"] = o.site;
  } else if (o.kind == "magnetization") {
    out["axis"] = o.axis;
    if (!o.sites.empty()) out["sites"] = o.sites;
  } else {
    out["sites"] = o.sites;
    out["axes"] = o.axes;
  }
  return out;
}

json variant_json(int variant) { return variant == 0 ? json("both") : json(variant); }

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["schema_version"] = cfg.schema_version;

  json model = params_to_json(cfg.model.preset, cfg.model.params);
  model["preset"] = cfg.model.preset;
  model["sites"] = cfg.model.sites;
  model["spin"] = cfg.model.spin;
  model["periodic"] = cfg.model.periodic;
  if (!cfg.model.segments.empty()) {
    json segs = json::array();
    for (const auto& s : cfg.model.segments) {
      json seg = params_to_json(cfg.model.preset, s.params);
      seg["duration"] = s.duration;
      segs.push_back(seg);
    }
    model["segments"] = segs;
  }
  doc["model"] = model;

  const StateConfig& st = cfg.task.initial_state;
  json state{{"kind", st.kind}};
  if (st.kind == "basis") state["index"] = st.index;
  if (st.kind == "coherent") {
    state["theta"] = st.theta;
    state["phi"] = st.phi;
  }
  doc["task"] = {{"initial_state", state},
                 {"o1", observable_to_json(cfg.task.o1)},
                 {"o2", observable_to_json(cfg.task.o2)},
                 {"t1", cfg.task.t1},
                 {"t2", cfg.task.t2}};

  const ProtocolConfig& p = cfg.protocol;
  json proto{{"name", p.name}};
  const auto keys = protocol_keys(p.name);
  auto put = [&](const std::string& key, json value) {
    if (keys.count(key)) proto[key] = std::move(value);
  };
  put("lambda", p.lambda);
  put("lambda2", p.lambda2);
  put("zeta", p.zeta);
  put("axis", p.axis);
  put("variant", variant_json(p.variant));
  put("mode", p.mode);
  put("readout", p.readout);
  put("n", p.n);
  put("seed", p.seed);
  put("theta", p.theta);
  put("sampling", p.sampling);
  put("error_method", p.error_method);
  put("bootstrap_resamples", p.bootstrap_resamples);
  if (keys.count("grid")) {
    proto["grid"] = p.grid.values.empty() ? json{{"lo", p.grid.lo}, {"hi", p.grid.hi}, {"points", p.grid.points}}
                                          : json{{"values", p.grid.values}};
  }
  doc["protocol"] = proto;
  doc["compare_oracle"] = cfg.compare_oracle;
  doc["tolerances"] = {{"normalization", cfg.tolerances.normalization},
                       {"completeness", cfg.tolerances.completeness},
                       {"equivalence", cfg.tolerances.equivalence},
                       {"oracle", cfg.tolerances.oracle}};
  doc["output"] = {{"directory", cfg.output.directory}, {"tables", cfg.output.tables}};
  return doc;
}

std::string serialize_config(const ExperimentConfig& config) { return config_to_json(config).dump(2); }

}  // namespace nimp
