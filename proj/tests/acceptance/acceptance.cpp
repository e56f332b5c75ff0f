// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance [--trials N] [--only 1,4,9]
//
// --trials shrinks the Monte-Carlo criteria for local iteration; ctest runs
// the defaults.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lpnnloc/analysis.hpp"
#include "lpnnloc/experiment.hpp"
#include "lpnnloc/rng.hpp"
#include "lpnnloc/scene.hpp"
#include "lpnnloc/solver.hpp"
#include "lpnnloc/thresholds.hpp"

namespace {

using namespace lpnnloc;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kMasterSeed = 20240601;
const Vec2 kTarget(-2000, 1000);

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  int trials = 100;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  // Shared between criteria.
  std::vector<std::pair<std::string, RunResult>> noise_free_runs;
  std::vector<std::string> margin_violations;
  long margin_checked = 0;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void record_margins(Context& ctx, const ExperimentReport& rep, const std::string& label) {
  for (const TrialRecord& r : rep.records) {
    if (!r.converged) continue;
    ++ctx.margin_checked;
    if (!(r.proposition_one_margin >= -1e-6)) {
      ctx.margin_violations.push_back(label + " trial " + std::to_string(r.trial) + " " +
                                      to_string(r.solver));
    }
  }
}

std::map<SolverKind, double> rmse_by_solver(const ExperimentReport& rep, double level) {
  std::map<SolverKind, double> out;
  for (const ReportRow& row : rep.rows) {
    if (row.level == level) out[row.solver] = row.rmse;
  }
  return out;
}

std::string rmse_summary(const std::map<SolverKind, double>& r) {
  std::string s;
  for (const auto& [k, v] : r) s += std::string(to_string(k)) + "=" + fmt("%.4g", v) + " ";
  return s;
}

ExperimentReport run_preset(const Context& ctx, const char* id, std::vector<double> levels,
                            std::uint64_t seed = kMasterSeed) {
  ExperimentOptions o;
  o.master_seed = seed;
  o.trials = ctx.trials;
  o.levels = std::move(levels);
  o.threads = ctx.threads;
  return run_experiment(make_preset(id), o);
}

// 1. Noise-free recovery.
Outcome criterion1(Context& ctx) {
  const ScenarioGeometry g = reference_geometry();
  const MeasurementSet d = true_distances(g);
  Outcome out{true, ""};
  for (SolverKind kind : kAllSolverKinds) {
    SolverConfig c;
    c.kind = kind;
    c.max_iters = 20000000;
    const auto t0 = Clock::now();
    const RunResult r = solve(g, d, c);
    const double secs = seconds_since(t0);
    const double err = (r.estimate - kTarget).norm();
    const bool ok = r.converged && err <= 1.0 && secs < 10.0;
    out.pass = out.pass && ok;
    out.detail += std::string(to_string(kind)) + ": err " + fmt("%.2e", err) + " m, " +
                  std::to_string(r.iterations) + " it, " + fmt("%.2f", secs) + " s" +
                  (r.converged ? "" : " NOT CONVERGED") + "; ";
    ctx.noise_free_runs.emplace_back(to_string(kind), r);
    ++ctx.margin_checked;
    if (r.converged && !(r.proposition_one_margin >= -1e-6)) {
      ctx.margin_violations.push_back(std::string("noise-free ") + to_string(kind));
    }
  }
  return out;
}

// 2. Lagrangian finite-difference oracle.
Outcome criterion2(Context&) {
  const auto t0 = Clock::now();
  const ScenarioGeometry g = reference_geometry();
  NoiseSpec spec;
  spec.gaussian_variance = 100;
  spec.seed = kMasterSeed;
  const ScaledProblem pr =
      ScaledProblem::make(g, apply_noise(true_distances(g), spec), kDefaultLengthScale);
  rng::Stream r(kMasterSeed);
  Outcome out{true, ""};
  for (SolverKind kind : kAllSolverKinds) {
    SolverConfig c;
    c.kind = kind;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      SolverState s = init_state(pr, c);
      s.p = Vec2(r.uniform(-1, 1), r.uniform(-1, 1));
      for (Eigen::VectorXd* v : {&s.dt, &s.dr}) {
        for (Eigen::Index k = 0; k < v->size(); ++k) (*v)[k] = r.uniform(0.2, 3);
      }
      for (Eigen::VectorXd* v : {&s.alpha, &s.beta, &s.lambda}) {
        for (Eigen::Index k = 0; k < v->size(); ++k) (*v)[k] = r.uniform(-1, 1);
      }
      for (Eigen::Index k = 0; k < s.zu.size(); ++k) {
        double u = 0.0;
        do {
          u = r.uniform(-3, 3);
        } while (std::abs(std::abs(u) - 1.0) <= 2e-3);
        s.zu[k] = u;
      }
      worst = std::max(worst, analysis::finite_diff_lagrangian_check(s, pr, c));
    }
    out.pass = out.pass && worst <= 1e-6;
    out.detail += std::string(to_string(kind)) + " max rel err " + fmt("%.2e", worst) + "; ";
  }
  const double secs = seconds_since(t0);
  out.pass = out.pass && secs < 60.0;
  out.detail += fmt("%.2f s", secs);
  return out;
}

// 3. Gaussian noise near the CRLB.
Outcome criterion3(Context& ctx) {
  const auto t0 = Clock::now();
  const ExperimentReport rep = run_preset(ctx, "exp1", {10.0});
  const double secs = seconds_since(t0);
  record_margins(ctx, rep, "exp1");
  const auto r = rmse_by_solver(rep, 10.0);
  const double crlb = analysis::crlb(reference_geometry(), 100.0).rmse_bound;
  const bool ok = r.at(SolverKind::kL2Baseline) <= 1.5 * crlb &&
                  r.at(SolverKind::kMethod1LogCosh) <= 2 * crlb &&
                  r.at(SolverKind::kMethod2LcaL1) <= 2 * crlb && secs < 600;
  return {ok, rmse_summary(r) + "crlb=" + fmt("%.4g", crlb) + "; " + fmt("%.0f s", secs)};
}

// 4. One NLOS antenna.
Outcome criterion4(Context& ctx) {
  const auto t0 = Clock::now();
  const ExperimentReport rep = run_preset(ctx, "exp2a", {1e3, 1e4});
  const double secs = seconds_since(t0);
  record_margins(ctx, rep, "exp2a");
  const auto a = rmse_by_solver(rep, 1e3);
  const auto b = rmse_by_solver(rep, 1e4);
  using K = SolverKind;
  const bool at1e3 = a.at(K::kMethod1LogCosh) < a.at(K::kL2Baseline) / 3 &&
                     a.at(K::kMethod2LcaL1) < a.at(K::kL2Baseline) / 3;
  const bool at1e4 = b.at(K::kMethod2LcaL0) <= b.at(K::kMethod2LcaL1) &&
                     b.at(K::kMethod2LcaL1) <= b.at(K::kMethod1LogCosh) &&
                     b.at(K::kMethod1LogCosh) <= b.at(K::kL2Baseline) / 10;
  return {at1e3 && at1e4 && secs < 900,
          "1e3: " + rmse_summary(a) + (at1e3 ? "ok" : "violated") + "; 1e4: " + rmse_summary(b) +
              (at1e4 ? "ok" : "violated") + "; " + fmt("%.0f s", secs)};
}

// 5. Laplace outliers on five entries.
Outcome criterion5(Context& ctx) {
  const auto t0 = Clock::now();
  const ExperimentReport rep = run_preset(ctx, "exp3", {2e4});
  const double secs = seconds_since(t0);
  record_margins(ctx, rep, "exp3");
  const auto r = rmse_by_solver(rep, 2e4);
  using K = SolverKind;
  const double l2 = r.at(K::kL2Baseline);
  bool ok = r.at(K::kMethod1LogCosh) < l2 && r.at(K::kMethod2LcaL1) < l2 &&
            r.at(K::kMethod2LcaL0) < l2;
  for (const auto& [k, v] : r) ok = ok && r.at(K::kMethod2LcaL0) <= v;
  return {ok, rmse_summary(r) + fmt("%.0f s", secs)};
}

// 6. Proposition 1 over every converged run above.
Outcome criterion6(Context& ctx) {
  std::string detail = std::to_string(ctx.margin_checked) + " converged runs checked, " +
                       std::to_string(ctx.margin_violations.size()) + " violations";
  for (std::size_t k = 0; k < std::min<std::size_t>(3, ctx.margin_violations.size()); ++k) {
    detail += "; " + ctx.margin_violations[k];
  }
  return {ctx.margin_violations.empty() && ctx.margin_checked > 0, detail};
}

// 7. Constraint-gradient rank at the noise-free equilibria.
Outcome criterion7(Context& ctx) {
  const ScenarioGeometry g = reference_geometry();
  Outcome out{!ctx.noise_free_runs.empty(), ""};
  for (const auto& [name, run] : ctx.noise_free_runs) {
    const SolverKind kind = *parse_solver_kind(name);
    const ScaledProblem pr = ScaledProblem::make(g, true_distances(g), kDefaultLengthScale);
    const analysis::RankReport rep = analysis::constraint_jacobian(run.final_state, pr, kind);
    const bool ok = run.converged && rep.numerical_rank == 24 &&
                    rep.min_singular_value > 1e-8 * rep.max_singular_value;
    out.pass = out.pass && ok;
    out.detail += name + " rank " + std::to_string(rep.numerical_rank) + "/24, smin/smax " +
                  fmt("%.1e", rep.min_singular_value / rep.max_singular_value) + "; ";
  }
  return out;
}

// 8. Threshold identities.
Outcome criterion8(Context&) {
  using namespace thresholds;
  const auto t0 = Clock::now();
  const int n = 100000;
  long soft_bad = 0;
  long hard_bad = 0;
  long general_bad = 0;
  long jac_bad = 0;
  for (int k = 0; k < n; ++k) {
    const double u = -5.0 + 10.0 * k / (n - 1);
    for (double lam : {0.5, 1.0, 2.0}) {
      const double soft = std::abs(u) <= lam ? 0.0 : (u > 0 ? u - lam : u + lam);
      const double hard = std::abs(u) <= lam ? 0.0 : u;
      soft_bad += soft_threshold(u, lam) != soft;
      hard_bad += hard_threshold(u, lam) != hard;
    }
    if (std::abs(std::abs(u) - 1.0) >= 1e-4) {
      general_bad += std::abs(general_threshold(u, {1e6, 1, 1}) - soft_threshold(u, 1)) > 1e-6;
    }
    for (const ThresholdParams& p :
         {ThresholdParams{10, 1, 1}, ThresholdParams{100, 0.5, 2}, ThresholdParams{1e4, 0, 1}}) {
      if (std::abs(std::abs(u) - p.lambda) < std::max(1e-3, 30.0 / p.eta)) continue;
      if (p.delta > 0 && std::abs(u) < 1e-5) continue;
      const double h = 1e-6;
      const double fd = (general_threshold(u + h, p) - general_threshold(u - h, p)) / (2 * h);
      const double an = threshold_jacobian_term(u, p);
      jac_bad += std::abs(an - fd) / std::max(std::abs(an), 1.0) > 1e-4;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = soft_bad + hard_bad + general_bad + jac_bad == 0 && secs < 10;
  return {ok, "mismatches soft " + std::to_string(soft_bad) + ", hard " +
                  std::to_string(hard_bad) + ", eta=1e6 " + std::to_string(general_bad) +
                  ", jacobian " + std::to_string(jac_bad) + "; " + fmt("%.2f s", secs)};
}

// 9. Settling time of lca-l1 on one exp2-style draw.
Outcome criterion9(Context&) {
  const ScenarioGeometry g = reference_geometry();
  NoiseSpec spec;
  spec.kind = NoiseKind::kNlosExponential;
  spec.gaussian_variance = 100;
  spec.outlier_scale = 1e3;
  spec.contamination.mode = ContaminationMode::kOneAntenna;
  spec.seed = rng::derive_seed(kMasterSeed, {0});
  const MeasurementSet d = apply_noise(true_distances(g), spec);
  SolverConfig c;
  c.kind = SolverKind::kMethod2LcaL1;
  c.convergence_tol = 1e-6;
  c.max_iters = static_cast<long>(std::llround(100.0 / c.steps.mu1));
  const RunResult within = solve(g, d, c);
  std::string detail = "after " + std::to_string(within.iterations) + " it (" +
                       fmt("%.0f", within.iterations * c.steps.mu1) + " time units) update norm " +
                       fmt("%.2e", within.final_residuals.update_norm);
  // How long it actually takes, for the record.
  SolverConfig longer = c;
  longer.max_iters = 20000000;
  const RunResult full = solve(g, d, longer);
  detail += full.converged ? "; reaches 1e-6 at " + fmt("%.0f", full.iterations * c.steps.mu1) +
                                 " time units"
                           : "; still above 1e-6 after " +
                                 fmt("%.0f", full.iterations * c.steps.mu1) + " time units";
  detail += "; error " + fmt("%.2f", (within.estimate - kTarget).norm()) + " m";
  return {within.converged, detail};
}

// 10. Byte-identical reruns.
Outcome criterion10(Context& ctx) {
  const auto t0 = Clock::now();
  ExperimentOptions o;
  o.master_seed = kMasterSeed;
  o.trials = std::min(ctx.trials, 3);
  o.threads = 1;
  const ExperimentPreset p = make_preset("exp2c");
  const ExperimentReport a = run_experiment(p, o);
  o.threads = 2;
  const ExperimentReport b = run_experiment(p, o);
  const bool same = report_csv(a) == report_csv(b) && plot_csv(a) == plot_csv(b);
  return {same && !report_csv(a).empty(),
          "exp2c, 7 levels x " + std::to_string(*o.trials) + " trials, 1 vs 2 threads: " +
              (same ? "identical" : "DIFFERENT") + "; " + fmt("%.0f s", seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  std::set<int> only;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--trials") == 0 && k + 1 < argc) {
      ctx.trials = std::atoi(argv[++k]);
    } else if (std::strcmp(argv[k], "--only") == 0 && k + 1 < argc) {
      std::stringstream ss(argv[++k]);
      std::string item;
      while (std::getline(ss, item, ',')) only.insert(std::atoi(item.c_str()));
    } else {
      std::fprintf(stderr, "usage: %s [--trials N] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }
  if (ctx.trials < 1) return 2;

  const std::vector<std::pair<const char*, std::function<Outcome(Context&)>>> criteria = {
      {"noise-free recovery", criterion1},
      {"Lagrangian finite-difference oracle", criterion2},
      {"exp1 sigma=10 vs CRLB", criterion3},
      {"exp2a robustness ordering", criterion4},
      {"exp3 Laplace ordering", criterion5},
      {"Proposition 1 margin", criterion6},
      {"constraint-gradient rank", criterion7},
      {"threshold identities", criterion8},
      {"lca-l1 settling time", criterion9},
      {"reproducible CSVs", criterion10},
  };
  std::printf("acceptance: seed %llu, %d trials, %u threads\n",
              static_cast<unsigned long long>(kMasterSeed), ctx.trials, ctx.threads);
  std::fflush(stdout);
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
