// Copyright 2026 The coragp Authors
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

#ifndef CORAGP_H_
#define CORAGP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CORAGP_BUILDING_LIBRARY)
#define CORAGP_API __attribute__((visibility("default")))
#else
#define CORAGP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning cora_status leaves a message for
 * cora_last_error() on failure. */
typedef enum {
  CORA_OK = 0,
  CORA_ERR_ARGUMENT = 1,   /* null pointer, bad size or index */
  CORA_ERR_CONFIG = 2,     /* malformed or out-of-range configuration */
  CORA_ERR_VALIDATION = 3, /* topology / switching preconditions violated */
  CORA_ERR_NUMERICAL = 4,  /* non-finite state, failed factorization */
  CORA_ERR_IO = 5,         /* output could not be written */
  CORA_ERR_INTERNAL = 6
} cora_status;

typedef enum {
  CORA_MODE_CONFIG = -1, /* use the mode stored in the config */
  CORA_MODE_WITHOUT_GP = 0,
  CORA_MODE_INDIVIDUAL = 1,
  CORA_MODE_CGP = 2,
  CORA_MODE_CORA_TOP = 3,
  CORA_MODE_CORA_AVG = 4,
  CORA_MODE_EXACT = 5
} cora_mode;

typedef struct cora_config cora_config;
typedef struct cora_gp cora_gp;

/* Library version (git-describe style). */
CORAGP_API const char* cora_version(void);
/* Message of the last failure on the calling thread; "" if none. */
CORAGP_API const char* cora_last_error(void);
CORAGP_API const char* cora_mode_name(cora_mode mode);
CORAGP_API cora_status cora_mode_from_name(const char* name, cora_mode* out);

/* ---- configuration ---------------------------------------------------- */

/* overrides: n strings of the form "dotted.key=value" (may be NULL if n=0). */
CORAGP_API cora_status cora_config_load(const char* path, const char* const* overrides, size_t n,
                                        cora_config** out);
CORAGP_API cora_status cora_config_parse(const char* text, const char* const* overrides, size_t n,
                                         cora_config** out);
CORAGP_API void cora_config_free(cora_config* config);
CORAGP_API cora_status cora_config_set_seed(cora_config* config, uint64_t seed);
CORAGP_API uint64_t cora_config_seed(const cora_config* config);
CORAGP_API int cora_config_agents(const cora_config* config);
CORAGP_API cora_mode cora_config_mode(const cora_config* config);
/* Canonical text; release with cora_string_free. */
CORAGP_API cora_status cora_config_serialize(const cora_config* config, char** out);
/* 16 hex digits plus terminator. */
CORAGP_API cora_status cora_config_hash(const cora_config* config, char out[17]);
CORAGP_API void cora_string_free(char* s);

/* ---- experiments ------------------------------------------------------ */

typedef struct {
  double phi1[4]; /* row-major 2x2 */
  int phi1_positive_definite;
  double phi1_min_singular;
  double phi2_norm;
  double tracking_error_bound;
  double ultimate_bound;
  double min_shifted_singular;
  double min_laplacian_singular;
  double max_laplacian_singular;
  double min_inertia_max_singular;
  double eta_tilde;
  double leader_speed_bound;
  double phi;
  double min_variance;
  double gamma;
  int variance_condition;
} cora_bound_report;

typedef struct {
  cora_mode mode;
  uint64_t seed;
  long steps;
  long records;
  double steady_mean_error;
  double steady_max_error;
  double final_error;
  double coverage;
  double out_of_support_fraction;
  long degenerate_weights;
  long topology_jumps;
} cora_run_summary;

typedef struct {
  cora_mode mode;
  int trials;
  double mean;
  double median;
  double stddev;
  double ci_low;
  double ci_high;
  double coverage;
  int has_bound;
  double tracking_error_bound;
  double fraction_below_bound;
} cora_mode_stats;

typedef struct {
  cora_mode mode;
  int samples;
  int applicable;
  int repetitions;
  double mean_ms;
  double median_ms;
} cora_bench_row;

/* Structural checks plus the stability report for the given mode.
 * text (optional) receives a printable report; free with cora_string_free. */
CORAGP_API cora_status cora_validate(const cora_config* config, cora_mode mode, cora_bound_report* report,
                                     char** text);

/* Full-horizon run. When out_dir is non-NULL it receives trajectory.csv,
 * summary.json, config.preset and manifest.json. */
CORAGP_API cora_status cora_run(const cora_config* config, cora_mode mode, const char* out_dir,
                                cora_run_summary* summary);

/* Monte-Carlo batch over the modes in the config. trials <= 0 uses the
 * config value. stats must hold `capacity` entries; *count receives the
 * number of modes. out_dir as for cora_run (montecarlo_trials.csv,
 * montecarlo_summary.csv, summary.json, config.preset, manifest.json).
 * ordering (optional) receives the fraction of trials with the expected
 * error ordering, or -1 when the needed modes are absent. */
CORAGP_API cora_status cora_montecarlo(const cora_config* config, int trials, const char* out_dir,
                                       cora_mode_stats* stats, size_t capacity, size_t* count, double* ordering);

/* Aggregation-weight timing. sample_sizes may be NULL for the default grid;
 * repetitions <= 0 uses 1000. Writes bench.csv and manifest.json to out_dir
 * if given. */
CORAGP_API cora_status cora_bench(const cora_config* config, const int* sample_sizes, size_t n_sizes,
                                  int repetitions, const char* out_dir, cora_bench_row* rows, size_t capacity,
                                  size_t* count);

/* Least-squares slope of log(y) over log(x). */
CORAGP_API cora_status cora_loglog_slope(const double* x, const double* y, size_t n, double* slope);

/* ---- GP regression and aggregation ------------------------------------ */

/* inputs: m x d row-major; targets: m x k row-major; inv_lengthscales: d. */
CORAGP_API cora_status cora_gp_fit(const double* inputs, size_t m, size_t d, const double* targets, size_t k,
                                   double signal_std, const double* inv_lengthscales, double noise_std,
                                   cora_gp** out);
CORAGP_API void cora_gp_free(cora_gp* gp);
CORAGP_API size_t cora_gp_size(const cora_gp* gp);
/* mean: k entries; variance may be NULL. */
CORAGP_API cora_status cora_gp_predict(const cora_gp* gp, const double* point, double* mean, double* variance);
/* kernel vector at point: size() entries. */
CORAGP_API cora_status cora_gp_kernel_vector(const cora_gp* gp, const double* point, double* out);

/* Aggregated prediction of agent `agent` among n GPs at point, with
 * neighborhood given by adjacency_row (n entries, self included).
 * mode is one of INDIVIDUAL, CGP, CORA_TOP, CORA_AVG. weights: n entries;
 * mean: k entries. */
CORAGP_API cora_status cora_aggregate(const cora_gp* const* gps, size_t n, size_t agent,
                                      const double* adjacency_row, cora_mode mode, double sigma_g,
                                      const double* point, double* weights, double* mean);

#ifdef __cplusplus
}
#endif

#endif /* CORAGP_H_ */
