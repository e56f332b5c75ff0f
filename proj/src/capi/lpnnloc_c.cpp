// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/lpnnloc.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "lpnnloc/analysis.hpp"
#include "lpnnloc/experiment.hpp"
#include "lpnnloc/scenario_io.hpp"
#include "lpnnloc/solver.hpp"

#ifndef LPNNLOC_VERSION
#define LPNNLOC_VERSION "0.0.0"
#endif

using namespace lpnnloc;

struct lpnn_scenario {
  Scenario scenario;
  MeasurementSet observed;
};

struct lpnn_result {
  ScaledProblem problem;
  SolverConfig config;
  RunResult run;
  ResidualDiagnostics diag;
  analysis::RankReport rank;
};

struct lpnn_report {
  ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

lpnn_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTargetMissing: return LPNN_ERR_TARGET_MISSING;
    case ErrorCode::kDegenerateGeometry: return LPNN_ERR_DEGENERATE_GEOMETRY;
    case ErrorCode::kPatternMismatch: return LPNN_ERR_PATTERN_MISMATCH;
    case ErrorCode::kUnderdeterminedScenario: return LPNN_ERR_UNDERDETERMINED;
    case ErrorCode::kDimensionMismatch: return LPNN_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kNonFiniteState: return LPNN_ERR_NON_FINITE_STATE;
    case ErrorCode::kDiverged: return LPNN_ERR_DIVERGED;
    case ErrorCode::kEmptyInput: return LPNN_ERR_EMPTY_INPUT;
    case ErrorCode::kConfigError: return LPNN_ERR_CONFIG;
    case ErrorCode::kIoError: return LPNN_ERR_IO;
    case ErrorCode::kInvalidArgument: return LPNN_ERR_INVALID_ARGUMENT;
  }
  return LPNN_ERR_INTERNAL;
}

lpnn_status fail(lpnn_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body` and maps exceptions to status codes.
template <typename F>
lpnn_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LPNN_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LPNN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LPNN_ERR_INTERNAL, e.what());
  }
}

SolverKind to_kind(lpnn_solver_kind k) {
  switch (k) {
    case LPNN_SOLVER_L2: return SolverKind::kL2Baseline;
    case LPNN_SOLVER_METHOD1: return SolverKind::kMethod1LogCosh;
    case LPNN_SOLVER_LCA_L1: return SolverKind::kMethod2LcaL1;
    case LPNN_SOLVER_LCA_L0: return SolverKind::kMethod2LcaL0;
  }
  throw Error(ErrorCode::kConfigError, "unknown solver kind " + std::to_string(k));
}

lpnn_solver_kind from_kind(SolverKind k) {
  switch (k) {
    case SolverKind::kL2Baseline: return LPNN_SOLVER_L2;
    case SolverKind::kMethod1LogCosh: return LPNN_SOLVER_METHOD1;
    case SolverKind::kMethod2LcaL1: return LPNN_SOLVER_LCA_L1;
    case SolverKind::kMethod2LcaL0: return LPNN_SOLVER_LCA_L0;
  }
  return LPNN_SOLVER_L2;
}

SolverConfig to_config(const lpnn_solver_options& o) {
  SolverConfig c;
  c.kind = to_kind(o.kind);
  c.aug_c = o.aug_c;
  c.a_sharpness = o.a_sharpness;
  c.steps = {o.mu[0], o.mu[1], o.mu[2], o.mu[3], o.mu[4], o.mu[5], o.mu[6]};
  c.max_iters = static_cast<long>(o.max_iters);
  c.convergence_tol = o.convergence_tol;
  c.length_scale = o.length_scale;
  c.init_seed = o.init_seed;
  c.trajectory_stride = static_cast<long>(o.trajectory_stride);
  c.validate();
  return c;
}

lpnn_status load(Scenario sc, lpnn_scenario** out) {
  MeasurementSet observed = sc.observed();
  *out = new lpnn_scenario{std::move(sc), std::move(observed)};
  return LPNN_OK;
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory(const lpnn_result& r, std::ostream& os) {
  const bool lca = uses_internal_state(r.config.kind);
  const std::size_t m = r.problem.m;
  const std::size_t n = r.problem.n;
  const std::size_t pairs = r.config.kind == SolverKind::kL2Baseline ? 0 : m * n;
  os << "iteration";
  for (std::size_t k = 0; k < pairs; ++k) os << (lca ? ",u" : ",z") << k + 1;
  if (lca) {
    for (std::size_t k = 0; k < pairs; ++k) os << ",z" << k + 1;
  }
  for (std::size_t i = 0; i < m; ++i) os << ",dt" << i + 1;
  for (std::size_t j = 0; j < n; ++j) os << ",dr" << j + 1;
  os << ",px,py";
  for (std::size_t k = 0; k < pairs; ++k) os << ",alpha" << k + 1;
  for (std::size_t i = 0; i < m; ++i) os << ",beta" << i + 1;
  for (std::size_t j = 0; j < n; ++j) os << ",lambda" << j + 1;
  os << "\n";
  auto put = [&os](const Eigen::VectorXd& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) os << ',' << num(v(k));
  };
  for (const TrajectorySample& s : r.run.trajectory) {
    os << s.iteration;
    put(s.state.zu);
    if (lca) put(output_z(s.state, r.config));
    put(s.state.dt);
    put(s.state.dr);
    os << ',' << num(s.state.p.x()) << ',' << num(s.state.p.y());
    put(s.state.alpha);
    put(s.state.beta);
    put(s.state.lambda);
    os << "\n";
  }
}

}  // namespace

extern "C" {

const char* lpnn_version(void) { return LPNNLOC_VERSION; }

const char* lpnn_last_error(void) { return g_last_error.c_str(); }

const char* lpnn_status_string(lpnn_status status) {
  switch (status) {
    case LPNN_OK: return "ok";
    case LPNN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LPNN_ERR_CONFIG: return "configuration error";
    case LPNN_ERR_IO: return "I/O error";
    case LPNN_ERR_TARGET_MISSING: return "target missing";
    case LPNN_ERR_DEGENERATE_GEOMETRY: return "degenerate geometry";
    case LPNN_ERR_PATTERN_MISMATCH: return "contamination pattern mismatch";
    case LPNN_ERR_UNDERDETERMINED: return "underdetermined scenario";
    case LPNN_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case LPNN_ERR_NON_FINITE_STATE: return "non-finite state";
    case LPNN_ERR_DIVERGED: return "diverged";
    case LPNN_ERR_EMPTY_INPUT: return "empty input";
    case LPNN_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case LPNN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* lpnn_solver_kind_name(lpnn_solver_kind kind) {
  try {
    return to_string(to_kind(kind));
  } catch (...) {
    return "unknown";
  }
}

lpnn_status lpnn_solver_kind_parse(const char* name, lpnn_solver_kind* out) {
  if (name == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto kind = parse_solver_kind(name);
  if (!kind) {
    return fail(LPNN_ERR_CONFIG, std::string("solver: unknown kind '") + name +
                                     "' (l2, method1, lca-l1, lca-l0)");
  }
  *out = from_kind(*kind);
  return LPNN_OK;
}

void lpnn_solver_options_default(lpnn_solver_options* out, lpnn_solver_kind kind) {
  if (out == nullptr) return;
  const SolverConfig c;
  out->kind = kind;
  out->aug_c = c.aug_c;
  out->a_sharpness = c.a_sharpness;
  const double mu[7] = {c.steps.mu1, c.steps.mu2, c.steps.mu3, c.steps.mu4,
                        c.steps.mu5, c.steps.mu6, c.steps.mu7};
  for (int k = 0; k < 7; ++k) out->mu[k] = mu[k];
  out->max_iters = c.max_iters;
  out->convergence_tol = c.convergence_tol;
  out->length_scale = c.length_scale;
  out->init_seed = c.init_seed;
  out->trajectory_stride = 0;
}

lpnn_status lpnn_scenario_load_file(const char* path, lpnn_scenario** out) {
  if (path == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] { load(load_scenario_file(path), out); });
}

lpnn_status lpnn_scenario_load_json(const char* text, lpnn_scenario** out) {
  if (text == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] { load(parse_scenario_json(text), out); });
}

void lpnn_scenario_free(lpnn_scenario* scenario) { delete scenario; }

void lpnn_scenario_dims(const lpnn_scenario* scenario, size_t* m, size_t* n) {
  if (scenario == nullptr) return;
  if (m) *m = scenario->scenario.geometry.m();
  if (n) *n = scenario->scenario.geometry.n();
}

lpnn_status lpnn_scenario_target(const lpnn_scenario* scenario, double xy[2]) {
  if (scenario == nullptr || xy == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto& target = scenario->scenario.geometry.target;
  if (!target) return fail(LPNN_ERR_TARGET_MISSING, "scenario has no target");
  xy[0] = target->x();
  xy[1] = target->y();
  return LPNN_OK;
}

lpnn_status lpnn_scenario_measurements(const lpnn_scenario* scenario, double* out,
                                       size_t len) {
  if (scenario == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto values = scenario->observed.values();
  if (len < values.size()) {
    return fail(LPNN_ERR_BUFFER_TOO_SMALL,
                "need room for " + std::to_string(values.size()) + " values");
  }
  std::copy(values.begin(), values.end(), out);
  return LPNN_OK;
}

lpnn_status lpnn_solve(const lpnn_scenario* scenario, const lpnn_solver_options* options,
                       lpnn_result** out) {
  if (scenario == nullptr || options == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<lpnn_result>();
    r->config = to_config(*options);
    r->problem = ScaledProblem::make(scenario->scenario.geometry, scenario->observed,
                                     r->config.length_scale);
    try {
      r->run = solve(r->problem, r->config);
    } catch (const DivergedError& e) {
      throw Error(ErrorCode::kDiverged,
                  std::string(to_string(r->config.kind)) + ": " + e.what());
    }
    r->diag = residual_report(r->run.final_state, r->problem, r->config);
    r->rank = analysis::constraint_jacobian(r->run.final_state, r->problem, r->config.kind);
    *out = r.release();
  });
}

void lpnn_result_free(lpnn_result* result) { delete result; }

void lpnn_result_estimate(const lpnn_result* result, double xy[2]) {
  if (result == nullptr || xy == nullptr) return;
  xy[0] = result->run.estimate.x();
  xy[1] = result->run.estimate.y();
}

int64_t lpnn_result_iterations(const lpnn_result* result) {
  return result ? result->run.iterations : 0;
}

int lpnn_result_converged(const lpnn_result* result) {
  return result && result->run.converged ? 1 : 0;
}

double lpnn_result_constraint_norm(const lpnn_result* result) {
  return result ? result->run.final_residuals.constraint_norm
                : std::numeric_limits<double>::quiet_NaN();
}

double lpnn_result_update_norm(const lpnn_result* result) {
  return result ? result->run.final_residuals.update_norm
                : std::numeric_limits<double>::quiet_NaN();
}

double lpnn_result_proposition_one_margin(const lpnn_result* result) {
  return result ? result->run.proposition_one_margin
                : std::numeric_limits<double>::quiet_NaN();
}

void lpnn_result_min_ranges(const lpnn_result* result, double* min_dt, double* min_dr) {
  if (result == nullptr) return;
  if (min_dt) *min_dt = result->diag.min_dt;
  if (min_dr) *min_dr = result->diag.min_dr;
}

size_t lpnn_result_pair_count(const lpnn_result* result) {
  return result ? result->problem.pairs() : 0;
}

lpnn_status lpnn_result_z(const lpnn_result* result, double* out, size_t len) {
  if (result == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  const Eigen::VectorXd& z = result->diag.z;
  if (len < static_cast<size_t>(z.size())) {
    return fail(LPNN_ERR_BUFFER_TOO_SMALL,
                "need room for " + std::to_string(z.size()) + " values");
  }
  for (Eigen::Index k = 0; k < z.size(); ++k) out[k] = z(k);
  return LPNN_OK;
}

lpnn_status lpnn_result_outlier_ranking(const lpnn_result* result, size_t* out,
                                        size_t len) {
  if (result == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  const auto& rank = result->diag.outlier_ranking;
  if (len < rank.size()) {
    return fail(LPNN_ERR_BUFFER_TOO_SMALL,
                "need room for " + std::to_string(rank.size()) + " values");
  }
  std::copy(rank.begin(), rank.end(), out);
  return LPNN_OK;
}

void lpnn_result_rank(const lpnn_result* result, int64_t* rank, int64_t* rows,
                      double* min_singular, double* max_singular) {
  if (result == nullptr) return;
  if (rank) *rank = result->rank.numerical_rank;
  if (rows) *rows = result->rank.jacobian.rows();
  if (min_singular) *min_singular = result->rank.min_singular_value;
  if (max_singular) *max_singular = result->rank.max_singular_value;
}

lpnn_status lpnn_result_write_trajectory(const lpnn_result* result, const char* path) {
  if (result == nullptr || path == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    if (std::string(path) == "-") {
      write_trajectory(*result, std::cout);
      std::cout.flush();
      return;
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::kIoError, std::string("cannot open ") + path);
    write_trajectory(*result, os);
    os.close();
    if (!os) throw Error(ErrorCode::kIoError, std::string("cannot write ") + path);
  });
}

lpnn_status lpnn_crlb(const lpnn_scenario* scenario, double sigma, double* rmse_bound,
                      double covariance[4]) {
  if (scenario == nullptr || rmse_bound == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return fail(LPNN_ERR_CONFIG, "sigma: expected a finite positive number");
  }
  return guarded([&] {
    const analysis::CrlbResult r = analysis::crlb(scenario->scenario.geometry, sigma * sigma);
    *rmse_bound = r.rmse_bound;
    if (covariance) {
      covariance[0] = r.covariance_bound(0, 0);
      covariance[1] = r.covariance_bound(0, 1);
      covariance[2] = r.covariance_bound(1, 0);
      covariance[3] = r.covariance_bound(1, 1);
    }
  });
}

void lpnn_experiment_options_default(lpnn_experiment_options* out) {
  if (out == nullptr) return;
  *out = lpnn_experiment_options{};
  out->preset = "exp1";
  out->threads = 0;
  lpnn_solver_options_default(&out->solver, LPNN_SOLVER_L2);
}

lpnn_status lpnn_experiment_run(const lpnn_experiment_options* options,
                                lpnn_report** out) {
  if (options == nullptr || out == nullptr || options->preset == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    const ExperimentPreset preset = make_preset(options->preset);
    ExperimentOptions eo;
    eo.master_seed = options->master_seed;
    if (options->trials < 0) throw Error(ErrorCode::kConfigError, "trials must be >= 1");
    if (options->trials > 0) eo.trials = options->trials;
    if (options->levels != nullptr) {
      eo.levels = std::vector<double>(options->levels,
                                      options->levels + options->level_count);
    }
    eo.threads = options->threads;
    eo.solver = to_config(options->solver);
    auto r = std::make_unique<lpnn_report>();
    r->report = run_experiment(preset, eo);
    *out = r.release();
  });
}

void lpnn_report_free(lpnn_report* report) { delete report; }

size_t lpnn_report_row_count(const lpnn_report* report) {
  return report ? report->report.rows.size() : 0;
}

lpnn_status lpnn_report_get_row(const lpnn_report* report, size_t index, lpnn_report_row* out) {
  if (report == nullptr || out == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  if (index >= report->report.rows.size()) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "row index out of range");
  }
  const ReportRow& r = report->report.rows[index];
  out->level = r.level;
  out->solver = from_kind(r.solver);
  out->rmse = r.rmse;
  out->crlb_rmse = r.crlb_rmse.value_or(std::numeric_limits<double>::quiet_NaN());
  out->converged_fraction = r.converged_fraction;
  out->mean_iterations = r.mean_iterations;
  out->trials = r.trials;
  out->diverged = r.diverged;
  return LPNN_OK;
}

lpnn_status lpnn_report_write(const lpnn_report* report, const char* out_dir) {
  if (report == nullptr || out_dir == nullptr) {
    return fail(LPNN_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] { write_report(report->report, out_dir); });
}

}  // extern "C"
