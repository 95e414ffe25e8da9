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

// Batch experiments described by a JSON document. The schema is documented
// in docs/config-schema.md; parse_config() validates it completely and
// serialize_config() writes the canonical form with every default filled in.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nimp/error.hpp"
#include "nimp/lattice.hpp"

namespace nimp {

inline constexpr int kSchemaVersion = 1;

std::string_view version() noexcept;

/// Hamiltonian parameters for one piece of the schedule.
struct ModelParams {
  double J = 1.0;
  double g = 1.0;      ///< tfim transverse field
  double delta = 1.0;  ///< xxz anisotropy
  double h = 0.0;      ///< xxz longitudinal field

  bool operator==(const ModelParams&) const = default;
};

struct SegmentConfig {
  double duration = 0.0;
  ModelParams params;

  bool operator==(const SegmentConfig&) const = default;
};

struct ModelConfig {
  std::string preset = "tfim";  ///< tfim | xxz | zero
  int sites = 2;
  double spin = 0.5;
  bool periodic = false;
  ModelParams params;
  /// Piecewise-constant schedule; empty means a constant Hamiltonian. The
  /// last segment extends past its duration.
  std::vector<SegmentConfig> segments;

  bool operator==(const ModelConfig&) const = default;
};

struct StateConfig {
  std::string kind = "all_up";  ///< all_up | neel | basis | coherent
  std::uint64_t index = 0;      ///< basis
  double theta = 0.0;           ///< coherent
  double phi = 0.0;             ///< coherent

  bool operator==(const StateConfig&) const = default;
};

struct ObservableConfig {
  std::string kind = "spin";  ///< spin | magnetization | product
  std::string axis = "z";     ///< spin, magnetization
  int site = 0;               ///< spin
  std::vector<int> sites;     ///< magnetization (empty: all), product
  std::vector<std::string> axes;  ///< product

  bool operator==(const ObservableConfig&) const = default;
};

struct TaskConfig {
  StateConfig initial_state;
  ObservableConfig o1;
  ObservableConfig o2;
  double t1 = 0.0;
  double t2 = 0.0;

  bool operator==(const TaskConfig&) const = default;
};

struct GridConfig {
  double lo = 1e-3;
  double hi = 1.0;
  int points = 8;
  std::vector<double> values;  ///< explicit grid; overrides lo/hi/points

  bool operator==(const GridConfig&) const = default;
};

struct ProtocolConfig {
  std::string name = "oracle";  ///< oracle | nimp | simul | ancilla-free-im | ancilla-free-re | povm-check | lambda-scan
  double lambda = 1e-2;
  double lambda2 = 1e-2;  ///< simul: second ancilla
  double zeta = 0.5;
  std::string axis = "z";
  int variant = 0;  ///< 0: both
  std::string mode = "exact";         ///< exact | linearized
  std::string readout = "deferred";   ///< deferred | immediate
  std::uint64_t n = 0;                ///< shots; 0 selects exact probabilities
  std::uint64_t seed = 0;
  double theta = 1.0;
  std::string sampling = "distribution";  ///< ancilla-free-re: distribution | trajectory
  std::string error_method = "delta";     ///< delta | bootstrap
  int bootstrap_resamples = 200;
  GridConfig grid;

  bool operator==(const ProtocolConfig&) const = default;
};

struct ToleranceConfig {
  double normalization = 1e-10;  ///< sampling: |sum p - 1|
  double completeness = 1e-11;   ///< Kraus completeness
  double equivalence = 1e-11;    ///< Kraus vs ancilla simulation
  double oracle = 1e-11;         ///< exact protocols vs the oracle

  bool operator==(const ToleranceConfig&) const = default;
};

struct OutputConfig {
  std::string directory = ".";
  bool tables = true;

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ModelConfig model;
  TaskConfig task;
  ProtocolConfig protocol;
  bool compare_oracle = false;
  ToleranceConfig tolerances;
  OutputConfig output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Raised with every schema violation found, each prefixed by a JSON pointer.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
std::string serialize_config(const ExperimentConfig& config);

/// Re-runs the semantic checks on a config built in code.
void validate_config(const ExperimentConfig& config);

/// Model, state and observables materialized from the config.
CorrelationTask build_task(const ExperimentConfig& config);

struct ExecuteOptions {
  unsigned threads = 1;
};

struct ExperimentResult {
  /// Deterministic for a fixed config and seed.
  nlohmann::json payload;
  double wall_time_seconds = 0.0;
  /// name -> CSV text (header row first).
  std::map<std::string, std::string> tables;

  /// payload plus the timing block.
  nlohmann::json document() const;
};

ExperimentResult execute(const ExperimentConfig& config, const ExecuteOptions& options = {});

/// Writes result.json and <table>.csv into `directory` (created if missing).
void write_outputs(const ExperimentResult& result, const std::string& directory);

/// {"error": {"code", "message", "violations"?}}
nlohmann::json error_json(const std::exception& error);

}  // namespace nimp
