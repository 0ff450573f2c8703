/* Copyright 2026 The latdpc Authors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LATDPC_LATDPC_H_
#define LATDPC_LATDPC_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LATDPC_API __declspec(dllexport)
#else
#define LATDPC_API __attribute__((visibility("default")))
#endif

typedef enum latdpc_status {
  LATDPC_OK = 0,
  LATDPC_ERR_NULL = 1,
  LATDPC_ERR_INVALID_ARGUMENT = 2,
  LATDPC_ERR_CONFIG = 3,
  LATDPC_ERR_NUMERIC = 4,
  LATDPC_ERR_IO = 5,
  LATDPC_ERR_INTERNAL = 6
} latdpc_status;

typedef enum latdpc_format { LATDPC_FORMAT_CSV = 0, LATDPC_FORMAT_TABLE = 1 } latdpc_format;

/* Opaque handles. */
typedef struct latdpc_experiment latdpc_experiment;
typedef struct latdpc_pair latdpc_pair;
typedef struct latdpc_result latdpc_result;

LATDPC_API const char* latdpc_version(void);
/* Message of the last failed call on this thread; empty when none. */
LATDPC_API const char* latdpc_last_error(void);
LATDPC_API const char* latdpc_status_string(latdpc_status status);
/* Frees strings returned through char** out-parameters. */
LATDPC_API void latdpc_string_free(char* s);

/* Experiment configuration: defaults, then key=value updates. */
LATDPC_API latdpc_status latdpc_experiment_create(latdpc_experiment** out);
LATDPC_API latdpc_status latdpc_experiment_load(latdpc_experiment* exp, const char* path);
LATDPC_API latdpc_status latdpc_experiment_set(latdpc_experiment* exp, const char* key,
                                               const char* value);
LATDPC_API latdpc_status latdpc_experiment_validate(const latdpc_experiment* exp);
LATDPC_API latdpc_status latdpc_experiment_canonical(const latdpc_experiment* exp, char** out);
LATDPC_API latdpc_status latdpc_experiment_hash(const latdpc_experiment* exp, uint64_t* out);
LATDPC_API void latdpc_experiment_destroy(latdpc_experiment* exp);

/* Nested lattice pair of an experiment (fixture or Construction-A). */
LATDPC_API latdpc_status latdpc_pair_create(const latdpc_experiment* exp, latdpc_pair** out);
LATDPC_API latdpc_status latdpc_pair_save(const latdpc_pair* pair, const char* path);
/* Text summary: dimension, coset count, rates, second moment, generators. */
LATDPC_API latdpc_status latdpc_pair_describe(const latdpc_pair* pair, char** out);
LATDPC_API latdpc_status latdpc_pair_rate(const latdpc_pair* pair, double* rate_bits);
LATDPC_API void latdpc_pair_destroy(latdpc_pair* pair);

/* Monte-Carlo runs. workers <= 0 selects LATDPC_WORKERS or the hardware count.
 * pair may be NULL, in which case it is built from the experiment. */
LATDPC_API latdpc_status latdpc_run_sweep(const latdpc_experiment* exp, const latdpc_pair* pair,
                                          int workers, latdpc_result** out);
LATDPC_API latdpc_status latdpc_run_interference_as_noise(const latdpc_experiment* exp,
                                                          const latdpc_pair* pair, int workers,
                                                          latdpc_result** out);
LATDPC_API latdpc_status latdpc_run_outage(const latdpc_experiment* exp, int workers,
                                           latdpc_result** out);

LATDPC_API latdpc_status latdpc_result_point_count(const latdpc_result* res, size_t* out);
/* scheme: "la-gpc", "interference-as-noise" or "interference-free-outage". */
LATDPC_API latdpc_status latdpc_result_point(const latdpc_result* res, size_t index,
                                             const char* scheme, double* snr_db,
                                             int64_t* trials, int64_t* errors);
LATDPC_API latdpc_status latdpc_result_render(const latdpc_result* res, latdpc_format format,
                                              char** out);
/* path NULL or "-" writes to stdout. */
LATDPC_API latdpc_status latdpc_result_write(const latdpc_result* res, latdpc_format format,
                                             const char* path);
LATDPC_API void latdpc_result_destroy(latdpc_result* res);

/* Diagnostics for one trial (grid point, trial index). */
LATDPC_API latdpc_status latdpc_trace_trial(const latdpc_experiment* exp, const latdpc_pair* pair,
                                            size_t point, uint64_t trial, const char* scheme,
                                            char** out_json);
LATDPC_API latdpc_status latdpc_filter_dump(const latdpc_experiment* exp, const latdpc_pair* pair,
                                            size_t point, uint64_t trial, char** out);

#ifdef __cplusplus
}
#endif

#endif  /* LATDPC_LATDPC_H_ */
