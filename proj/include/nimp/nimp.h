/*
 * Copyright 2026 The nimp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the experiment runner.
 *
 * Handles are opaque. Every fallible call returns a nimp_status; on failure
 * nimp_last_error() returns a JSON error object for the calling thread, valid
 * until the next failing call on that thread. Strings returned through char**
 * are owned by the caller and released with nimp_string_free().
 */

#ifndef NIMP_NIMP_H
#define NIMP_NIMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NIMP_API __declspec(dllexport)
#else
#define NIMP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct nimp_config nimp_config;
typedef struct nimp_result nimp_result;

typedef enum nimp_status {
  NIMP_OK = 0,
  NIMP_ERR_INVALID_ARGUMENT = 1,
  NIMP_ERR_DIMENSION_MISMATCH = 2,
  NIMP_ERR_NOT_HERMITIAN = 3,
  NIMP_ERR_NOT_NORMALIZED = 4,
  NIMP_ERR_PRECONDITION = 5,
  NIMP_ERR_INCOMPLETE_KRAUS = 6,
  NIMP_ERR_PARSE = 7,
  NIMP_ERR_SCHEMA = 8,
  NIMP_ERR_IO = 9,
  NIMP_ERR_NULL_ARGUMENT = 10,
  NIMP_ERR_INTERNAL = 11
} nimp_status;

NIMP_API const char* nimp_version(void);
NIMP_API const char* nimp_status_name(nimp_status status);

/* {"error": {"code": ..., "message": ..., "violations": [...]}}, or "" when
 * no call on this thread has failed. */
NIMP_API const char* nimp_last_error(void);

/* Parses and validates a JSON config of `length` bytes. */
NIMP_API nimp_status nimp_config_parse(const char* text, size_t length, nimp_config** out);
NIMP_API nimp_status nimp_config_load(const char* path, nimp_config** out);
NIMP_API nimp_status nimp_config_set_seed(nimp_config* config, uint64_t seed);
NIMP_API nimp_status nimp_config_set_output_dir(nimp_config* config, const char* directory);
/* Canonical JSON with every default filled in. */
NIMP_API nimp_status nimp_config_to_json(const nimp_config* config, char** out);
NIMP_API void nimp_config_free(nimp_config* config);

/* threads == 0 reads NIMP_THREADS from the environment (default 1). */
NIMP_API nimp_status nimp_execute(const nimp_config* config, unsigned threads, nimp_result** out);

/* Result document; include_timing = 0 yields the deterministic payload. */
NIMP_API nimp_status nimp_result_json(const nimp_result* result, int include_timing, char** out);
NIMP_API size_t nimp_result_table_count(const nimp_result* result);
/* Borrowed pointers, valid while `result` lives. */
NIMP_API nimp_status nimp_result_table(const nimp_result* result, size_t index, const char** name,
                                       const char** csv);
/* Writes result.json and the CSV tables; directory NULL uses the config's. */
NIMP_API nimp_status nimp_result_write(const nimp_result* result, const char* directory);
NIMP_API void nimp_result_free(nimp_result* result);

NIMP_API void nimp_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* NIMP_NIMP_H */
