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

// nimpctl: batch runner over the C API.
//
//   nimpctl run <config.json> [--output-dir DIR] [--seed N] [--threads N]
//   nimpctl validate <config.json>
//
// Success prints JSON on stdout and exits 0. Failure prints the library's
// error object on stderr and exits with the nimp_status value.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nimp/nimp.h"

namespace {

int report(nimp_status status) {
  std::fprintf(stderr, "%s\n", nimp_last_error());
  return static_cast<int>(status);
}

struct ConfigHandle {
  nimp_config* ptr = nullptr;
  ~ConfigHandle() { nimp_config_free(ptr); }
};

struct ResultHandle {
  nimp_result* ptr = nullptr;
  ~ResultHandle() { nimp_result_free(ptr); }
};

void print_owned(char* s) {
  std::printf("%s\n", s);
  nimp_string_free(s);
}

int cmd_validate(const std::string& path) {
  ConfigHandle cfg;
  if (nimp_status st = nimp_config_load(path.c_str(), &cfg.ptr); st != NIMP_OK) return report(st);
  char* text = nullptr;
  if (nimp_status st = nimp_config_to_json(cfg.ptr, &text); st != NIMP_OK) return report(st);
  print_owned(text);
  return 0;
}

int cmd_run(const std::string& path, const std::optional<std::string>& output_dir,
            const std::optional<std::uint64_t>& seed, unsigned threads) {
  ConfigHandle cfg;
  if (nimp_status st = nimp_config_load(path.c_str(), &cfg.ptr); st != NIMP_OK) return report(st);
  if (seed) nimp_config_set_seed(cfg.ptr, *seed);
  if (output_dir) {
    if (nimp_status st = nimp_config_set_output_dir(cfg.ptr, output_dir->c_str()); st != NIMP_OK) return report(st);
  }
  ResultHandle result;
  if (nimp_status st = nimp_execute(cfg.ptr, threads, &result.ptr); st != NIMP_OK) return report(st);
  if (nimp_status st = nimp_result_write(result.ptr, nullptr); st != NIMP_OK) return report(st);
  char* doc = nullptr;
  if (nimp_status st = nimp_result_json(result.ptr, 1, &doc); st != NIMP_OK) return report(st);
  print_owned(doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noninvasive measurement protocol experiments"};
  app.set_version_flag("--version", std::string(nimp_version()));
  app.require_subcommand(1);

  std::string run_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Execute a config and write result.json plus CSV tables");
  run->add_option("config", run_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", output_dir, "Override output.directory");
  run->add_option("--seed", seed, "Override protocol.seed");
  run->add_option("--threads", threads, "Sampler threads (default: $NIMP_THREADS or 1)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse a config and print its canonical form");
  validate->add_option("config", validate_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (*run) return cmd_run(run_path, output_dir, seed, threads);
  return cmd_validate(validate_path);
}
