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

#include "nimp/nimp.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <new>
#include <string>
#include <vector>

#include "nimp/experiment.hpp"

struct nimp_config {
  nimp::ExperimentConfig config;
};

struct nimp_result {
  nimp::ExperimentResult result;
  std::string output_dir;
  std::vector<std::pair<std::string, std::string>> tables;  // stable storage for borrowed pointers
};

namespace {

thread_local std::string last_error;

nimp_status status_of(nimp::ErrorCode code) {
  switch (code) {
    case nimp::ErrorCode::invalid_argument: return NIMP_ERR_INVALID_ARGUMENT;
    case nimp::ErrorCode::dimension_mismatch: return NIMP_ERR_DIMENSION_MISMATCH;
    case nimp::ErrorCode::not_hermitian: return NIMP_ERR_NOT_HERMITIAN;
    case nimp::ErrorCode::not_normalized: return NIMP_ERR_NOT_NORMALIZED;
    case nimp::ErrorCode::precondition: return NIMP_ERR_PRECONDITION;
    case nimp::ErrorCode::incomplete_kraus: return NIMP_ERR_INCOMPLETE_KRAUS;
    case nimp::ErrorCode::parse: return NIMP_ERR_PARSE;
    case nimp::ErrorCode::schema: return NIMP_ERR_SCHEMA;
    case nimp::ErrorCode::io: return NIMP_ERR_IO;
  }
  return NIMP_ERR_INTERNAL;
}

nimp_status set_error(nimp_status status, const std::string& code, const std::string& message) {
  last_error = nlohmann::json{{"error", {{"code", code}, {"message", message}}}}.dump();
  return status;
}

// Runs body() and converts exceptions into status codes plus last_error.
template <class Body>
nimp_status guarded(Body&& body) {
  try {
    body();
    return NIMP_OK;
  } catch (const nimp::Error& e) {
    last_error = nimp::error_json(e).dump();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    return set_error(NIMP_ERR_INTERNAL, "internal", "out of memory");
  } catch (const std::exception& e) {
    last_error = nimp::error_json(e).dump();
    return NIMP_ERR_INTERNAL;
  }
}

nimp_status null_argument(const char* what) {
  return set_error(NIMP_ERR_NULL_ARGUMENT, "null_argument", std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

unsigned default_threads() {
  if (const char* env = std::getenv("NIMP_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace

extern "C" {

const char* nimp_version(void) { return NIMP_VERSION; }

const char* nimp_status_name(nimp_status status) {
  switch (status) {
    case NIMP_OK: return "ok";
    case NIMP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NIMP_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case NIMP_ERR_NOT_HERMITIAN: return "not_hermitian";
    case NIMP_ERR_NOT_NORMALIZED: return "not_normalized";
    case NIMP_ERR_PRECONDITION: return "precondition";
    case NIMP_ERR_INCOMPLETE_KRAUS: return "incomplete_kraus";
    case NIMP_ERR_PARSE: return "parse";
    case NIMP_ERR_SCHEMA: return "schema";
    case NIMP_ERR_IO: return "io";
    case NIMP_ERR_NULL_ARGUMENT: return "null_argument";
    case NIMP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* nimp_last_error(void) { return last_error.c_str(); }

nimp_status nimp_config_parse(const char* text, size_t length, nimp_config** out) {
  if (text == nullptr) return null_argument("text");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new nimp_config{nimp::parse_config(std::string_view(text, length))}; });
}

nimp_status nimp_config_load(const char* path, nimp_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  std::ifstream f(path, std::ios::binary);
  if (!f) return set_error(NIMP_ERR_IO, "io", std::string("cannot open config '") + path + "'");
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return nimp_config_parse(text.data(), text.size(), out);
}

nimp_status nimp_config_set_seed(nimp_config* config, uint64_t seed) {
  if (config == nullptr) return null_argument("config");
  config->config.protocol.seed = seed;
  return NIMP_OK;
}

nimp_status nimp_config_set_output_dir(nimp_config* config, const char* directory) {
  if (config == nullptr) return null_argument("config");
  if (directory == nullptr || *directory == '\0') return null_argument("directory");
  config->config.output.directory = directory;
  return NIMP_OK;
}

nimp_status nimp_config_to_json(const nimp_config* config, char** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = copy_string(nimp::serialize_config(config->config)); });
}

void nimp_config_free(nimp_config* config) { delete config; }

nimp_status nimp_execute(const nimp_config* config, unsigned threads, nimp_result** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    nimp::ExecuteOptions options;
    options.threads = threads == 0 ? default_threads() : threads;
    auto* r = new nimp_result{nimp::execute(config->config, options), config->config.output.directory, {}};
    for (const auto& [name, csv] : r->result.tables) r->tables.emplace_back(name, csv);
    *out = r;
  });
}

nimp_status nimp_result_json(const nimp_result* result, int include_timing, char** out) {
  if (result == nullptr) return null_argument("result");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto& doc = include_timing ? result->result.document() : result->result.payload;
    *out = copy_string(doc.dump(2));
  });
}

size_t nimp_result_table_count(const nimp_result* result) { return result == nullptr ? 0 : result->tables.size(); }

nimp_status nimp_result_table(const nimp_result* result, size_t index, const char** name, const char** csv) {
  if (result == nullptr) return null_argument("result");
  if (name == nullptr || csv == nullptr) return null_argument("name/csv");
  if (index >= result->tables.size()) {
    return set_error(NIMP_ERR_INVALID_ARGUMENT, "invalid_argument", "table index out of range");
  }
  *name = result->tables[index].first.c_str();
  *csv = result->tables[index].second.c_str();
  return NIMP_OK;
}

nimp_status nimp_result_write(const nimp_result* result, const char* directory) {
  if (result == nullptr) return null_argument("result");
  return guarded([&] { nimp::write_outputs(result->result, directory ? directory : result->output_dir); });
}

void nimp_result_free(nimp_result* result) { delete result; }

void nimp_string_free(char* s) { std::free(s); }

}  // extern "C"
