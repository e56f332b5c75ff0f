// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lpnnloc/rng.hpp"

namespace lpnnloc {

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kL2Baseline: return "l2";
    case SolverKind::kMethod1LogCosh: return "method1";
    case SolverKind::kMethod2LcaL1: return "lca-l1";
    case SolverKind::kMethod2LcaL0: return "lca-l0";
  }
  return "unknown";
}

std::optional<SolverKind> parse_solver_kind(std::string_view name) {
  for (SolverKind kind : kAllSolverKinds) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kConfigError,
                std::string(field) + " must be a finite positive number");
  }
}

}  // namespace

void SolverConfig::validate() const {
  require_positive(aug_c, "augC");
  require_positive(length_scale, "lengthScale");
  require_positive(convergence_tol, "convergenceTol");
  if (kind == SolverKind::kMethod1LogCosh &&
      !(a_sharpness > 1.0 && std::isfinite(a_sharpness))) {
    throw Error(ErrorCode::kConfigError, "aSharpness must be greater than 1");
  }
  const std::array<std::pair<double, const char*>, 7> mus = {{
      {steps.mu1, "steps.mu1"}, {steps.mu2, "steps.mu2"}, {steps.mu3, "steps.mu3"},
      {steps.mu4, "steps.mu4"}, {steps.mu5, "steps.mu5"}, {steps.mu6, "steps.mu6"},
      {steps.mu7, "steps.mu7"}}};
  for (const auto& [mu, name] : mus) require_positive(mu, name);
  if (max_iters < 1) throw Error(ErrorCode::kConfigError, "maxIters must be >= 1");
  if (trajectory_stride < 0) {
    throw Error(ErrorCode::kConfigError, "trajectoryStride must be >= 0");
  }
}

thresholds::ThresholdParams SolverConfig::threshold() const {
  return kind == SolverKind::kMethod2LcaL0 ? thresholds::ThresholdParams::l0_proxy()
                                           : thresholds::ThresholdParams::soft(1.0);
}

ScaledProblem ScaledProblem::make(const ScenarioGeometry& geometry,
                                  const MeasurementSet& measurements,
                                  double length_scale) {
  require_positive(length_scale, "lengthScale");
  ScaledProblem pb;
  pb.m = geometry.m();
  pb.n = geometry.n();
  if (pb.m == 0 || pb.n == 0 || pb.m * pb.n < 3) {
    throw Error(ErrorCode::kUnderdeterminedScenario,
                "need M >= 1, N >= 1 and M*N >= 3 measurements, got M=" +
                    std::to_string(pb.m) + ", N=" + std::to_string(pb.n));
  }
  if (measurements.m() != pb.m || measurements.n() != pb.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "measurements are " + std::to_string(measurements.m()) + "x" +
                    std::to_string(measurements.n()) + " but geometry is " +
                    std::to_string(pb.m) + "x" + std::to_string(pb.n));
  }
  const double inv = 1.0 / length_scale;
  pb.tx.resize(2, static_cast<Eigen::Index>(pb.m));
  pb.rx.resize(2, static_cast<Eigen::Index>(pb.n));
  for (std::size_t i = 0; i < pb.m; ++i) pb.tx.col(i) = geometry.transmitters[i] * inv;
  for (std::size_t j = 0; j < pb.n; ++j) pb.rx.col(j) = geometry.receivers[j] * inv;
  pb.dhat.resize(static_cast<Eigen::Index>(measurements.size()));
  for (std::size_t k = 0; k < measurements.size(); ++k) pb.dhat(k) = measurements[k] * inv;
  pb.length_scale = length_scale;
  return pb;
}

std::size_t NeuronGroups::scalar_count() const {
  return static_cast<std::size_t>(zu.size() + dt.size() + dr.size() + 2 +
                                  alpha.size() + beta.size() + lambda.size());
}

double NeuronGroups::max_abs() const {
  // NaN must propagate so that callers can detect divergence from this value.
  double out = p.cwiseAbs().maxCoeff<Eigen::PropagateNaN>();
  for (const Eigen::VectorXd* v : {&zu, &dt, &dr, &alpha, &beta, &lambda}) {
    if (v->size() == 0) continue;
    const double here = v->cwiseAbs().maxCoeff<Eigen::PropagateNaN>();
    if (std::isnan(here)) return here;
    out = std::max(out, here);
  }
  return out;
}

bool NeuronGroups::all_finite() const {
  return zu.allFinite() && dt.allFinite() && dr.allFinite() && p.allFinite() &&
         alpha.allFinite() && beta.allFinite() && lambda.allFinite();
}

DivergedError::DivergedError(long iteration, SolverState last_finite)
    : Error(ErrorCode::kDiverged,
            "state became non-finite at iteration " + std::to_string(iteration)),
      iteration_(iteration),
      last_finite_(std::move(last_finite)) {}

namespace {

Eigen::Index pair_count(const ScaledProblem& pb, SolverKind kind) {
  return kind == SolverKind::kL2Baseline ? 0 : static_cast<Eigen::Index>(pb.pairs());
}

void check_dims(const NeuronGroups& s, const ScaledProblem& pb, SolverKind kind) {
  const Eigen::Index k = pair_count(pb, kind);
  const auto m = static_cast<Eigen::Index>(pb.m);
  const auto n = static_cast<Eigen::Index>(pb.n);
  if (s.zu.size() != k || s.alpha.size() != k || s.dt.size() != m ||
      s.beta.size() != m || s.dr.size() != n || s.lambda.size() != n ||
      pb.dhat.size() != static_cast<Eigen::Index>(pb.pairs())) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string("solver state does not match the ") +
                    std::to_string(pb.m) + "x" + std::to_string(pb.n) +
                    " problem for solver " + to_string(kind));
  }
}

void output_z_into(const SolverState& s, const SolverConfig& config,
                   Eigen::VectorXd& z) {
  if (!uses_internal_state(config.kind)) {
    z = s.zu;
    return;
  }
  const thresholds::ThresholdParams params = config.threshold();
  z.resize(s.zu.size());
  for (Eigen::Index k = 0; k < s.zu.size(); ++k) {
    z(k) = thresholds::general_threshold(s.zu(k), params);
  }
}

/// Scratch buffers reused across iterations of one solve.
struct Workspace {
  Eigen::VectorXd z;
  Eigen::VectorXd pull;  // alpha + C * pair residual
};

// Fills `d` for every kind. Terms shared by all formulations come from the
// range constraints dt_i^2 = ||p - t_i||^2, dr_j^2 = ||p - r_j||^2 and their
// C/2-weighted squares. The pair constraint z = dhat - dt - dr exists for
// every kind but the l2 baseline, which instead carries the least-squares
// objective on dhat - dt - dr.
void compute_dynamics(const SolverState& s, const ScaledProblem& pb,
                      const SolverConfig& config, Workspace& ws,
                      StateDerivative& d) {
  const double c = config.aug_c;
  const std::size_t m = pb.m;
  const std::size_t n = pb.n;

  d.dt.resize(static_cast<Eigen::Index>(m));
  d.dr.resize(static_cast<Eigen::Index>(n));
  d.beta.resize(static_cast<Eigen::Index>(m));
  d.lambda.resize(static_cast<Eigen::Index>(n));
  d.p.setZero();

  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 diff = s.p - pb.tx.col(i);
    const double h = s.dt(i) * s.dt(i) - diff.squaredNorm();
    d.beta(i) = h;
    d.dt(i) = -2.0 * s.beta(i) * s.dt(i) - 2.0 * c * s.dt(i) * h;
    d.p += 2.0 * (s.beta(i) + c * h) * diff;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 diff = s.p - pb.rx.col(j);
    const double h = s.dr(j) * s.dr(j) - diff.squaredNorm();
    d.lambda(j) = h;
    d.dr(j) = -2.0 * s.lambda(j) * s.dr(j) - 2.0 * c * s.dr(j) * h;
    d.p += 2.0 * (s.lambda(j) + c * h) * diff;
  }

  if (config.kind == SolverKind::kL2Baseline) {
    d.zu.resize(0);
    d.alpha.resize(0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        const double e = pb.dhat(pair_index(i, j, m)) - s.dt(i) - s.dr(j);
        d.dt(i) += 2.0 * e;
        d.dr(j) += 2.0 * e;
      }
    }
    return;
  }

  const auto pairs = static_cast<Eigen::Index>(pb.pairs());
  output_z_into(s, config, ws.z);
  d.alpha.resize(pairs);
  ws.pull.resize(pairs);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = pair_index(i, j, m);
      const double r = ws.z(k) - pb.dhat(k) + s.dt(i) + s.dr(j);
      d.alpha(k) = r;
      const double pull = s.alpha(k) + c * r;
      ws.pull(k) = pull;
      d.dt(i) -= pull;
      d.dr(j) -= pull;
    }
  }

  d.zu.resize(pairs);
  if (config.kind == SolverKind::kMethod1LogCosh) {
    const double a = config.a_sharpness;
    for (Eigen::Index k = 0; k < pairs; ++k) {
      d.zu(k) = -std::tanh(a * ws.z(k)) - ws.pull(k);
    }
  } else {
    for (Eigen::Index k = 0; k < pairs; ++k) {
      d.zu(k) = -thresholds::penalty_gradient(s.zu(k), ws.z(k)) - ws.pull(k);
    }
  }
}

void apply_step(const SolverState& s, const StateDerivative& d,
                const StepSizes& mu, SolverState& out) {
  out.zu = s.zu + mu.mu1 * d.zu;
  out.dt = s.dt + mu.mu2 * d.dt;
  out.dr = s.dr + mu.mu3 * d.dr;
  out.p = s.p + mu.mu4 * d.p;
  out.alpha = s.alpha + mu.mu5 * d.alpha;
  out.beta = s.beta + mu.mu6 * d.beta;
  out.lambda = s.lambda + mu.mu7 * d.lambda;
}

StateDerivative dynamics_for(SolverKind expected, const SolverState& state,
                             const ScaledProblem& problem,
                             const SolverConfig& config) {
  if (config.kind != expected &&
      !(uses_internal_state(expected) && uses_internal_state(config.kind))) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("config is for solver ") + to_string(config.kind));
  }
  check_dims(state, problem, config.kind);
  Workspace ws;
  StateDerivative d;
  compute_dynamics(state, problem, config, ws, d);
  return d;
}

}  // namespace

SolverState init_state(const ScaledProblem& problem, const SolverConfig& config) {
  if (problem.m == 0 || problem.n == 0 || problem.pairs() < 3) {
    throw Error(ErrorCode::kUnderdeterminedScenario,
                "need M*N >= 3 measurements to localize in 2-D");
  }
  rng::Stream stream(config.init_seed);
  auto draw = [&stream](Eigen::Index size) {
    Eigen::VectorXd v(size);
    for (Eigen::Index k = 0; k < size; ++k) v(k) = stream.uniform(-0.01, 0.01);
    return v;
  };
  const Eigen::Index k = pair_count(problem, config.kind);
  SolverState s;
  s.zu = draw(k);
  s.dt = draw(static_cast<Eigen::Index>(problem.m));
  s.dr = draw(static_cast<Eigen::Index>(problem.n));
  s.p = draw(2);
  s.alpha = draw(k);
  s.beta = draw(static_cast<Eigen::Index>(problem.m));
  s.lambda = draw(static_cast<Eigen::Index>(problem.n));
  return s;
}

Eigen::VectorXd output_z(const SolverState& state, const SolverConfig& config) {
  Eigen::VectorXd z;
  output_z_into(state, config, z);
  return z;
}

StateDerivative method1_dynamics(const SolverState& state,
                                 const ScaledProblem& problem,
                                 const SolverConfig& config) {
  return dynamics_for(SolverKind::kMethod1LogCosh, state, problem, config);
}

StateDerivative method2_dynamics(const SolverState& state,
                                 const ScaledProblem& problem,
                                 const SolverConfig& config) {
  return dynamics_for(SolverKind::kMethod2LcaL1, state, problem, config);
}

StateDerivative l2_dynamics(const SolverState& state, const ScaledProblem& problem,
                            const SolverConfig& config) {
  return dynamics_for(SolverKind::kL2Baseline, state, problem, config);
}

StateDerivative dynamics(const SolverState& state, const ScaledProblem& problem,
                         const SolverConfig& config) {
  return dynamics_for(config.kind, state, problem, config);
}

SolverState step(const SolverState& state, const StateDerivative& derivative,
                 const StepSizes& steps) {
  if (state.zu.size() != derivative.zu.size() ||
      state.dt.size() != derivative.dt.size() ||
      state.dr.size() != derivative.dr.size() ||
      state.alpha.size() != derivative.alpha.size() ||
      state.beta.size() != derivative.beta.size() ||
      state.lambda.size() != derivative.lambda.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "state and derivative have different shapes");
  }
  SolverState out;
  apply_step(state, derivative, steps, out);
  if (!out.all_finite()) {
    throw Error(ErrorCode::kNonFiniteState, "Euler step produced a non-finite state");
  }
  return out;
}

ResidualDiagnostics residual_report(const SolverState& state,
                                    const ScaledProblem& problem,
                                    const SolverConfig& config) {
  check_dims(state, problem, config.kind);
  const std::size_t m = problem.m;
  const std::size_t n = problem.n;
  ResidualDiagnostics out;
  out.tx_residuals.resize(static_cast<Eigen::Index>(m));
  out.rx_residuals.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    out.tx_residuals(i) =
        state.dt(i) * state.dt(i) - (state.p - problem.tx.col(i)).squaredNorm();
  }
  for (std::size_t j = 0; j < n; ++j) {
    out.rx_residuals(j) =
        state.dr(j) * state.dr(j) - (state.p - problem.rx.col(j)).squaredNorm();
  }
  out.constraint_norm = std::max(out.tx_residuals.cwiseAbs().maxCoeff(),
                                 out.rx_residuals.cwiseAbs().maxCoeff());

  const auto pairs = static_cast<Eigen::Index>(problem.pairs());
  if (config.kind == SolverKind::kL2Baseline) {
    out.z.resize(pairs);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = pair_index(i, j, m);
        out.z(k) = problem.dhat(k) - state.dt(i) - state.dr(j);
      }
    }
  } else {
    out.z = output_z(state, config);
    out.pair_residuals.resize(pairs);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = pair_index(i, j, m);
        out.pair_residuals(k) = out.z(k) - problem.dhat(k) + state.dt(i) + state.dr(j);
      }
    }
    out.constraint_norm =
        std::max(out.constraint_norm, out.pair_residuals.cwiseAbs().maxCoeff());
  }
  out.min_dt = state.dt.minCoeff();
  out.min_dr = state.dr.minCoeff();

  out.outlier_ranking.resize(static_cast<std::size_t>(pairs));
  std::iota(out.outlier_ranking.begin(), out.outlier_ranking.end(), std::size_t{0});
  std::stable_sort(out.outlier_ranking.begin(), out.outlier_ranking.end(),
                   [&out](std::size_t a, std::size_t b) {
                     return std::abs(out.z(a)) > std::abs(out.z(b));
                   });
  return out;
}

RunResult solve(const ScenarioGeometry& geometry,
                const MeasurementSet& measurements, const SolverConfig& config) {
  config.validate();
  return solve(ScaledProblem::make(geometry, measurements, config.length_scale),
               config);
}

RunResult solve(const ScaledProblem& problem, const SolverConfig& config) {
  config.validate();
  SolverState current = init_state(problem, config);
  check_dims(current, problem, config.kind);
  SolverState next;
  StateDerivative deriv;
  Workspace ws;

  RunResult result;
  long iter = 0;
  double update_norm = 0.0;
  for (;; ++iter) {
    compute_dynamics(current, problem, config, ws, deriv);
    update_norm = deriv.max_abs();
    // A non-finite entry anywhere in the state shows up in the derivative.
    // After the swap below `next` holds the previous, finite iterate.
    if (!std::isfinite(update_norm)) {
      throw DivergedError(iter, iter == 0 ? current : next);
    }
    if (config.trajectory_stride > 0 && iter % config.trajectory_stride == 0) {
      result.trajectory.push_back({iter, current});
    }
    if (update_norm <= config.convergence_tol) {
      result.converged = true;
      break;
    }
    if (iter == config.max_iters) break;
    apply_step(current, deriv, config.steps, next);
    std::swap(current, next);
  }

  const ResidualDiagnostics diag = residual_report(current, problem, config);
  result.iterations = iter;
  result.estimate = current.p * problem.length_scale;
  result.final_residuals.constraint_norm = diag.constraint_norm;
  result.final_residuals.update_norm = update_norm;
  result.proposition_one_margin = std::min(diag.min_dt, diag.min_dr);
  if (config.trajectory_stride > 0 &&
      (result.trajectory.empty() || result.trajectory.back().iteration != iter)) {
    result.trajectory.push_back({iter, current});
  }
  result.final_state = std::move(current);
  return result;
}

}  // namespace lpnnloc
