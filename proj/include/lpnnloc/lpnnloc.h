/* Copyright 2026 The lpnnloc Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to lpnnloc. Every function that can fail returns an
 * lpnn_status; the message of the most recent failure on the calling thread
 * is available from lpnn_last_error(). Objects returned through out-pointers
 * are owned by the caller and released with the matching *_free function.
 * Lengths are in meters unless stated otherwise.
 */
#ifndef LPNNLOC_LPNNLOC_H_
#define LPNNLOC_LPNNLOC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(LPNNLOC_BUILDING)
#define LPNN_API __declspec(dllexport)
#else
#define LPNN_API __declspec(dllimport)
#endif
#else
#define LPNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lpnn_status {
  LPNN_OK = 0,
  LPNN_ERR_INVALID_ARGUMENT = 1,
  LPNN_ERR_CONFIG = 2,
  LPNN_ERR_IO = 3,
  LPNN_ERR_TARGET_MISSING = 4,
  LPNN_ERR_DEGENERATE_GEOMETRY = 5,
  LPNN_ERR_PATTERN_MISMATCH = 6,
  LPNN_ERR_UNDERDETERMINED = 7,
  LPNN_ERR_DIMENSION_MISMATCH = 8,
  LPNN_ERR_NON_FINITE_STATE = 9,
  LPNN_ERR_DIVERGED = 10,
  LPNN_ERR_EMPTY_INPUT = 11,
  LPNN_ERR_BUFFER_TOO_SMALL = 12,
  LPNN_ERR_INTERNAL = 99
} lpnn_status;

typedef enum lpnn_solver_kind {
  LPNN_SOLVER_L2 = 0,
  LPNN_SOLVER_METHOD1 = 1,
  LPNN_SOLVER_LCA_L1 = 2,
  LPNN_SOLVER_LCA_L0 = 3
} lpnn_solver_kind;

typedef struct lpnn_scenario lpnn_scenario;
typedef struct lpnn_result lpnn_result;
typedef struct lpnn_report lpnn_report;

typedef struct lpnn_solver_options {
  lpnn_solver_kind kind;
  double aug_c;
  double a_sharpness;
  /* mu[0] .. mu[6]: z or u, dt, dr, p, alpha, beta, lambda. */
  double mu[7];
  int64_t max_iters;
  double convergence_tol;
  double length_scale; /* meters per internal unit */
  uint64_t init_seed;
  /* Keep every n-th iterate for lpnn_result_write_trajectory; 0 = none. */
  int64_t trajectory_stride;
} lpnn_solver_options;

typedef struct lpnn_experiment_options {
  const char* preset; /* exp1, exp2a, exp2b, exp2c, exp3 */
  uint64_t master_seed;
  int32_t trials;         /* 0: preset default */
  const double* levels;   /* NULL: preset grid */
  size_t level_count;
  unsigned threads;       /* 0: hardware concurrency */
  /* kind and init_seed are ignored. */
  lpnn_solver_options solver;
} lpnn_experiment_options;

typedef struct lpnn_report_row {
  double level;
  lpnn_solver_kind solver;
  double rmse;      /* NaN if every trial diverged */
  double crlb_rmse; /* NaN off the Gaussian axis */
  double converged_fraction;
  double mean_iterations;
  int32_t trials;
  int32_t diverged;
} lpnn_report_row;

LPNN_API const char* lpnn_version(void);
LPNN_API const char* lpnn_last_error(void);
LPNN_API const char* lpnn_status_string(lpnn_status status);

LPNN_API const char* lpnn_solver_kind_name(lpnn_solver_kind kind);
LPNN_API lpnn_status lpnn_solver_kind_parse(const char* name, lpnn_solver_kind* out);
LPNN_API void lpnn_solver_options_default(lpnn_solver_options* out, lpnn_solver_kind kind);

/* Scenario files: see the README for the JSON layout. */
LPNN_API lpnn_status lpnn_scenario_load_file(const char* path, lpnn_scenario** out);
LPNN_API lpnn_status lpnn_scenario_load_json(const char* text, lpnn_scenario** out);
LPNN_API void lpnn_scenario_free(lpnn_scenario* scenario);
LPNN_API void lpnn_scenario_dims(const lpnn_scenario* scenario, size_t* m, size_t* n);
/* LPNN_ERR_TARGET_MISSING if the scenario has no ground truth. */
LPNN_API lpnn_status lpnn_scenario_target(const lpnn_scenario* scenario, double xy[2]);
/* The M*N observed sum-ranges, index k = M*(j-1) + i. */
LPNN_API lpnn_status lpnn_scenario_measurements(const lpnn_scenario* scenario,
                                                double* out, size_t len);

/* Runs one solve. On divergence returns LPNN_ERR_DIVERGED and *out is NULL. */
LPNN_API lpnn_status lpnn_solve(const lpnn_scenario* scenario,
                                const lpnn_solver_options* options, lpnn_result** out);
LPNN_API void lpnn_result_free(lpnn_result* result);
LPNN_API void lpnn_result_estimate(const lpnn_result* result, double xy[2]);
LPNN_API int64_t lpnn_result_iterations(const lpnn_result* result);
LPNN_API int lpnn_result_converged(const lpnn_result* result);
LPNN_API double lpnn_result_constraint_norm(const lpnn_result* result);
LPNN_API double lpnn_result_update_norm(const lpnn_result* result);
/* min(dt, dr) at the final state, internal units. */
LPNN_API double lpnn_result_proposition_one_margin(const lpnn_result* result);
LPNN_API void lpnn_result_min_ranges(const lpnn_result* result, double* min_dt,
                                     double* min_dr);
LPNN_API size_t lpnn_result_pair_count(const lpnn_result* result);
/* Output neurons z (internal units); for l2 the fitted residual. */
LPNN_API lpnn_status lpnn_result_z(const lpnn_result* result, double* out, size_t len);
/* Pair indices sorted by decreasing |z|. */
LPNN_API lpnn_status lpnn_result_outlier_ranking(const lpnn_result* result, size_t* out,
                                                 size_t len);
/* Constraint-gradient rank at the final state. */
LPNN_API void lpnn_result_rank(const lpnn_result* result, int64_t* rank, int64_t* rows,
                               double* min_singular, double* max_singular);
/* CSV of the recorded trajectory; path "-" writes to stdout. */
LPNN_API lpnn_status lpnn_result_write_trajectory(const lpnn_result* result,
                                                  const char* path);

/* Position-only Cramer-Rao bound for Gaussian noise of standard deviation
 * sigma. covariance is row-major 2x2 and may be NULL. */
LPNN_API lpnn_status lpnn_crlb(const lpnn_scenario* scenario, double sigma,
                               double* rmse_bound, double covariance[4]);

LPNN_API void lpnn_experiment_options_default(lpnn_experiment_options* out);
LPNN_API lpnn_status lpnn_experiment_run(const lpnn_experiment_options* options,
                                         lpnn_report** out);
LPNN_API void lpnn_report_free(lpnn_report* report);
LPNN_API size_t lpnn_report_row_count(const lpnn_report* report);
LPNN_API lpnn_status lpnn_report_get_row(const lpnn_report* report, size_t index,
                                         lpnn_report_row* out);
/* Writes <preset>_report.csv, <preset>_plot.csv, <preset>_metadata.json. */
LPNN_API lpnn_status lpnn_report_write(const lpnn_report* report, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* LPNNLOC_LPNNLOC_H_ */
