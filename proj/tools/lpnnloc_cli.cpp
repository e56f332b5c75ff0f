// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
//
// lpnnloc command-line front end. Talks to the library only through the C
// interface.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpnnloc/lpnnloc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct ScenarioDeleter {
  void operator()(lpnn_scenario* s) const { lpnn_scenario_free(s); }
};
struct ResultDeleter {
  void operator()(lpnn_result* r) const { lpnn_result_free(r); }
};
struct ReportDeleter {
  void operator()(lpnn_report* r) const { lpnn_report_free(r); }
};
using ScenarioPtr = std::unique_ptr<lpnn_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<lpnn_result, ResultDeleter>;
using ReportPtr = std::unique_ptr<lpnn_report, ReportDeleter>;

int report_error(lpnn_status status) {
  std::fprintf(stderr, "error: %s: %s\n", lpnn_status_string(status), lpnn_last_error());
  switch (status) {
    case LPNN_ERR_CONFIG:
    case LPNN_ERR_IO:
    case LPNN_ERR_PATTERN_MISMATCH:
    case LPNN_ERR_TARGET_MISSING:
    case LPNN_ERR_UNDERDETERMINED:
    case LPNN_ERR_DIMENSION_MISMATCH:
    case LPNN_ERR_DEGENERATE_GEOMETRY:
      return kExitConfig;
    case LPNN_ERR_DIVERGED:
    case LPNN_ERR_NON_FINITE_STATE:
      return kExitDiverged;
    default:
      return kExitFailure;
  }
}

struct SolverOverrides {
  std::optional<double> length_scale;
  std::optional<std::int64_t> max_iters;
  std::optional<double> tol;
  std::optional<std::uint64_t> init_seed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--length-scale", length_scale, "meters per internal unit");
    cmd->add_option("--max-iters", max_iters, "iteration cap");
    cmd->add_option("--tol", tol, "convergence tolerance on |dx/dt|");
    cmd->add_option("--init-seed", init_seed, "seed of the initial state");
  }
  void apply(lpnn_solver_options& o) const {
    if (length_scale) o.length_scale = *length_scale;
    if (max_iters) o.max_iters = *max_iters;
    if (tol) o.convergence_tol = *tol;
    if (init_seed) o.init_seed = *init_seed;
  }
};

int load(const std::string& path, ScenarioPtr& out) {
  lpnn_scenario* raw = nullptr;
  const lpnn_status st = lpnn_scenario_load_file(path.c_str(), &raw);
  if (st != LPNN_OK) return report_error(st);
  out.reset(raw);
  return kExitOk;
}

struct SolveArgs {
  std::string scenario;
  std::string solver = "lca-l1";
  bool dump_trajectory = false;
  std::string trajectory_out = "trajectory.csv";
  std::int64_t trajectory_stride = 1000;
  SolverOverrides overrides;
};

int run_solve(const SolveArgs& args) {
  ScenarioPtr sc;
  if (int rc = load(args.scenario, sc); rc != kExitOk) return rc;

  lpnn_solver_kind kind;
  if (lpnn_status st = lpnn_solver_kind_parse(args.solver.c_str(), &kind); st != LPNN_OK) {
    return report_error(st);
  }
  lpnn_solver_options opts;
  lpnn_solver_options_default(&opts, kind);
  args.overrides.apply(opts);
  if (args.dump_trajectory) opts.trajectory_stride = args.trajectory_stride;

  lpnn_result* raw = nullptr;
  if (lpnn_status st = lpnn_solve(sc.get(), &opts, &raw); st != LPNN_OK) {
    return report_error(st);
  }
  ResultPtr res(raw);

  double est[2];
  lpnn_result_estimate(res.get(), est);
  std::printf("solver            %s\n", lpnn_solver_kind_name(kind));
  std::printf("estimate          %.6f %.6f m\n", est[0], est[1]);
  double truth[2];
  if (lpnn_scenario_target(sc.get(), truth) == LPNN_OK) {
    std::printf("error             %.6f m\n",
                std::hypot(est[0] - truth[0], est[1] - truth[1]));
  }
  std::printf("iterations        %" PRId64 "\n", lpnn_result_iterations(res.get()));
  std::printf("converged         %s\n", lpnn_result_converged(res.get()) ? "yes" : "no");
  std::printf("update norm       %.3e\n", lpnn_result_update_norm(res.get()));
  std::printf("constraint norm   %.3e\n", lpnn_result_constraint_norm(res.get()));
  double min_dt = 0.0;
  double min_dr = 0.0;
  lpnn_result_min_ranges(res.get(), &min_dt, &min_dr);
  std::printf("min dt / min dr   %.6f / %.6f (internal units)\n", min_dt, min_dr);

  size_t m = 0;
  size_t n = 0;
  lpnn_scenario_dims(sc.get(), &m, &n);
  const size_t pairs = lpnn_result_pair_count(res.get());
  std::vector<double> z(pairs);
  std::vector<size_t> order(pairs);
  lpnn_result_z(res.get(), z.data(), z.size());
  lpnn_result_outlier_ranking(res.get(), order.data(), order.size());
  std::printf("largest |z|       ");
  for (size_t r = 0; r < std::min<size_t>(5, pairs); ++r) {
    const size_t k = order[r];
    std::printf("(%zu,%zu)=%.4g  ", k % m + 1, k / m + 1, z[k] * opts.length_scale);
  }
  std::printf("[m]\n");

  int64_t rank = 0;
  int64_t rows = 0;
  double smin = 0.0;
  double smax = 0.0;
  lpnn_result_rank(res.get(), &rank, &rows, &smin, &smax);
  std::printf("constraint rank   %" PRId64 " of %" PRId64 " (sigma min %.3e, max %.3e)\n",
              rank, rows, smin, smax);

  if (args.dump_trajectory) {
    if (lpnn_status st = lpnn_result_write_trajectory(res.get(), args.trajectory_out.c_str());
        st != LPNN_OK) {
      return report_error(st);
    }
    if (args.trajectory_out != "-") {
      std::printf("trajectory        %s\n", args.trajectory_out.c_str());
    }
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string preset;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::optional<int> trials;
  std::vector<double> levels;
  unsigned threads = 0;
  SolverOverrides overrides;
};

int run_experiment(const ExperimentArgs& args) {
  lpnn_experiment_options opts;
  lpnn_experiment_options_default(&opts);
  opts.preset = args.preset.c_str();
  opts.master_seed = args.seed;
  opts.trials = args.trials.value_or(0);
  if (!args.levels.empty()) {
    opts.levels = args.levels.data();
    opts.level_count = args.levels.size();
  }
  opts.threads = args.threads;
  args.overrides.apply(opts.solver);

  lpnn_report* raw = nullptr;
  if (lpnn_status st = lpnn_experiment_run(&opts, &raw); st != LPNN_OK) {
    return report_error(st);
  }
  ReportPtr report(raw);
  if (lpnn_status st = lpnn_report_write(report.get(), args.out_dir.c_str()); st != LPNN_OK) {
    return report_error(st);
  }
  std::printf("%-12s %-8s %-12s %-12s %-10s %s\n", "level", "solver", "rmse [m]",
              "crlb [m]", "converged", "diverged");
  const size_t rows = lpnn_report_row_count(report.get());
  for (size_t k = 0; k < rows; ++k) {
    lpnn_report_row row;
    lpnn_report_get_row(report.get(), k, &row);
    std::printf("%-12g %-8s %-12.4g %-12.4g %-10.2f %d\n", row.level,
                lpnn_solver_kind_name(row.solver), row.rmse, row.crlb_rmse,
                row.converged_fraction, row.diverged);
  }
  std::printf("wrote %s/%s_{report,plot}.csv and %s_metadata.json\n", args.out_dir.c_str(),
              args.preset.c_str(), args.preset.c_str());
  return kExitOk;
}

int run_crlb(const std::string& path, double sigma) {
  ScenarioPtr sc;
  if (int rc = load(path, sc); rc != kExitOk) return rc;
  double bound = 0.0;
  double cov[4];
  if (lpnn_status st = lpnn_crlb(sc.get(), sigma, &bound, cov); st != LPNN_OK) {
    return report_error(st);
  }
  std::printf("sigma             %g m\n", sigma);
  std::printf("rmse bound        %.6f m\n", bound);
  std::printf("covariance bound  [%.6g %.6g; %.6g %.6g] m^2\n", cov[0], cov[1], cov[2],
              cov[3]);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust MIMO radar target localization with LPNN solvers"};
  app.set_version_flag("--version", std::string(lpnn_version()));
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "run one solver on a scenario file");
  solve->add_option("scenario", solve_args.scenario, "scenario JSON")->required();
  solve->add_option("--solver", solve_args.solver, "l2, method1, lca-l1 or lca-l0")
      ->capture_default_str();
  solve->add_flag("--dump-trajectory", solve_args.dump_trajectory,
                  "write the decimated state trajectory as CSV");
  solve->add_option("--trajectory-out", solve_args.trajectory_out,
                    "trajectory file, '-' for stdout")
      ->capture_default_str();
  solve->add_option("--trajectory-stride", solve_args.trajectory_stride,
                    "keep every n-th iterate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  solve_args.overrides.add_to(solve);

  ExperimentArgs exp_args;
  CLI::App* exp = app.add_subcommand("experiment", "run a Monte-Carlo preset");
  exp->add_option("preset", exp_args.preset, "exp1, exp2a, exp2b, exp2c or exp3")
      ->required();
  exp->add_option("--seed", exp_args.seed, "master seed")->required();
  exp->add_option("--out", exp_args.out_dir, "output directory")->required();
  exp->add_option("--trials", exp_args.trials, "trials per level")
      ->check(CLI::PositiveNumber);
  exp->add_option("--levels", exp_args.levels, "override the level grid")->delimiter(',');
  exp->add_option("--threads", exp_args.threads, "worker threads, 0 = all cores")
      ->capture_default_str();
  exp_args.overrides.add_to(exp);

  std::string crlb_path;
  double sigma = 0.0;
  CLI::App* crlb = app.add_subcommand("crlb", "Cramer-Rao bound for a scenario");
  crlb->add_option("scenario", crlb_path, "scenario JSON")->required();
  crlb->add_option("--sigma", sigma, "noise standard deviation, m")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (solve->parsed()) return run_solve(solve_args);
  if (exp->parsed()) return run_experiment(exp_args);
  if (crlb->parsed()) return run_crlb(crlb_path, sigma);
  return kExitFailure;
}
