/*
 * Copyright 2026 The qlll developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the qlll core. Instances are opaque handles; every other
 * argument and result travels as a JSON string. Strings returned through
 * char** out-parameters are owned by the caller and must be released with
 * qlll_string_free().
 */

#ifndef QLLL_QLLL_H
#define QLLL_QLLL_H

#include <stdint.h>

#if defined(_WIN32)
#define QLLL_API __declspec(dllexport)
#elif defined(__GNUC__)
#define QLLL_API __attribute__((visibility("default")))
#else
#define QLLL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct qlll_instance qlll_instance;

typedef enum qlll_status {
  QLLL_OK = 0,
  QLLL_ERROR_INVALID_ARGUMENT = 1,
  QLLL_ERROR_PARSE = 2,
  QLLL_ERROR_VALIDATION = 3,
  QLLL_ERROR_LIMIT = 4,
  QLLL_ERROR_NUMERICAL = 5,
  QLLL_ERROR_IO = 6,
  QLLL_ERROR_INTERNAL = 7
} qlll_status;

QLLL_API const char *qlll_version(void);
QLLL_API const char *qlll_status_name(qlll_status status);

/* Message describing the most recent failure on this thread. */
QLLL_API const char *qlll_last_error(void);

QLLL_API void qlll_string_free(char *text);

/* Instance lifecycle. */
QLLL_API qlll_status qlll_instance_from_json(const char *json, qlll_instance **out);
QLLL_API qlll_status qlll_instance_load(const char *path, qlll_instance **out);
QLLL_API qlll_status qlll_instance_to_json(const qlll_instance *inst, char **out_json);
QLLL_API void qlll_instance_free(qlll_instance *inst);

QLLL_API int32_t qlll_instance_qubits(const qlll_instance *inst);
QLLL_API int32_t qlll_instance_flaws(const qlll_instance *inst);

/*
 * Generator. kind: random-local | random-commuting | chain | cycle |
 * appendix-e | appendix-f. params_json (may be NULL): { "n", "flaws",
 * "locality", "rank", "seed", "epsilon" }.
 */
QLLL_API qlll_status qlll_generate(const char *kind, const char *params_json,
                          char **out_instance_json);

/*
 * Condition checkers (SLC/GLC/CEC/SHC plus the implication cross-check).
 * witness_json (may be NULL): { "x": [..] } and/or { "y": [..] }.
 */
QLLL_API qlll_status qlll_check(const qlll_instance *inst, const char *witness_json,
                       char **out_report_json);

/* Uniform gap; subset_json (may be NULL): { "ids": ["a", ...] }. */
QLLL_API qlll_status qlll_gap(const qlll_instance *inst, const char *subset_json,
                     char **out_report_json);

/* Resampling bound, path estimate and tail thresholds for one condition. */
QLLL_API qlll_status qlll_bounds(const qlll_instance *inst, const char *condition,
                        const char *witness_json, char **out_report_json);

/*
 * Monte Carlo runs. options_json: { "mode", "trials", "seed", "theta",
 * "t", "tau", "max_resamplings", "delta", "epsilon", "iterations",
 * "initial_basis" }.
 */
QLLL_API qlll_status qlll_run(const qlll_instance *inst, const char *options_json,
                     char **out_report_json);

/*
 * Exhaustive log-tree verification. options_json: { "mode", "theta", "t",
 * "tau", "max_resamplings" }.
 */
QLLL_API qlll_status qlll_enumerate(const qlll_instance *inst, const char *options_json,
                           char **out_report_json);

/*
 * Resampling commutativity demo. options_json: { "a": id, "b": id,
 * "rho_basis": int }.
 */
QLLL_API qlll_status qlll_commutativity_demo(const qlll_instance *inst,
                                    const char *options_json,
                                    char **out_report_json);

#ifdef __cplusplus
}
#endif

#endif
