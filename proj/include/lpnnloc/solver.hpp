// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lpnnloc/error.hpp"
#include "lpnnloc/scene.hpp"
#include "lpnnloc/thresholds.hpp"

namespace lpnnloc {

enum class SolverKind {
  kL2Baseline,     // least squares on the sum-range residuals
  kMethod1LogCosh, // l1 objective smoothed by log(cosh(a z)) / a
  kMethod2LcaL1,   // LCA internal state, exact soft threshold
  kMethod2LcaL0,   // LCA internal state, threshold (1e4, 0, 1)
};

inline constexpr std::array<SolverKind, 4> kAllSolverKinds = {
    SolverKind::kL2Baseline, SolverKind::kMethod1LogCosh,
    SolverKind::kMethod2LcaL1, SolverKind::kMethod2LcaL0};

/// Stable identifiers: "l2", "method1", "lca-l1", "lca-l0".
const char* to_string(SolverKind kind);
std::optional<SolverKind> parse_solver_kind(std::string_view name);

/// True for the kinds whose first neuron group is the LCA internal state u.
constexpr bool uses_internal_state(SolverKind kind) {
  return kind == SolverKind::kMethod2LcaL1 || kind == SolverKind::kMethod2LcaL0;
}

/// Forward-Euler step sizes. mu1: z or u, mu2: dt, mu3: dr, mu4: p,
/// mu5: alpha, mu6: beta, mu7: lambda.
struct StepSizes {
  double mu1 = 1e-3;
  double mu2 = 1e-5;
  double mu3 = 1e-5;
  double mu4 = 1e-3;
  double mu5 = 1e-3;
  double mu6 = 1e-3;
  double mu7 = 1e-3;
};

/// Meters per internal length unit. See README ("Internal units").
inline constexpr double kDefaultLengthScale = 7000.0;

struct SolverConfig {
  SolverKind kind = SolverKind::kMethod2LcaL1;
  double aug_c = 20.0;
  double a_sharpness = 50.0;
  StepSizes steps;
  long max_iters = 2000000;
  /// Convergence when every |d(state)/dt| is at most this (internal units),
  /// i.e. every per-iteration update is at most tol * mu.
  double convergence_tol = 1e-8;
  double length_scale = kDefaultLengthScale;
  std::uint64_t init_seed = 1;
  /// Keep every n-th iterate in RunResult::trajectory; 0 disables recording.
  long trajectory_stride = 0;

  /// Throws Error(kConfigError) naming the offending field.
  void validate() const;
  /// Threshold used by the Method-2 kinds.
  thresholds::ThresholdParams threshold() const;
};

/// Geometry and measurements expressed in internal units.
struct ScaledProblem {
  std::size_t m = 0;
  std::size_t n = 0;
  Eigen::Matrix2Xd tx;
  Eigen::Matrix2Xd rx;
  Eigen::VectorXd dhat;
  double length_scale = 1.0;

  std::size_t pairs() const { return m * n; }

  /// Throws kDimensionMismatch when measurements do not match the geometry,
  /// kUnderdeterminedScenario when M*N < 3.
  static ScaledProblem make(const ScenarioGeometry& geometry,
                            const MeasurementSet& measurements,
                            double length_scale);
};

/// All neuron groups of the network. For the l2 baseline `zu` and `alpha` are
/// empty. For the Method-2 kinds `zu` holds the internal state u; the output
/// z is always derived as threshold(u) and never stored.
struct NeuronGroups {
  Eigen::VectorXd zu;
  Eigen::VectorXd dt;
  Eigen::VectorXd dr;
  Vec2 p = Vec2::Zero();
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd lambda;

  std::size_t scalar_count() const;
  /// Largest absolute entry over every group; NaN if any entry is NaN.
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const NeuronGroups&, const NeuronGroups&) = default;
};

struct SolverState : NeuronGroups {};
/// Time derivative of every group: minus the Lagrangian gradient for
/// variables, plus the gradient for multipliers.
struct StateDerivative : NeuronGroups {};

/// Small random initial state, uniform in [-0.01, 0.01] internal units,
/// drawn from config.init_seed.
SolverState init_state(const ScaledProblem& problem, const SolverConfig& config);

/// Output neurons z. Equal to `zu` for Method 1, threshold(u) for Method 2.
Eigen::VectorXd output_z(const SolverState& state, const SolverConfig& config);

StateDerivative method1_dynamics(const SolverState& state,
                                 const ScaledProblem& problem,
                                 const SolverConfig& config);
StateDerivative method2_dynamics(const SolverState& state,
                                 const ScaledProblem& problem,
                                 const SolverConfig& config);
StateDerivative l2_dynamics(const SolverState& state,
                            const ScaledProblem& problem,
                            const SolverConfig& config);
/// Dispatches on config.kind.
StateDerivative dynamics(const SolverState& state, const ScaledProblem& problem,
                         const SolverConfig& config);

/// One forward-Euler update. Throws kNonFiniteState if any entry of the
/// result is NaN or infinite.
SolverState step(const SolverState& state, const StateDerivative& derivative,
                 const StepSizes& steps);

struct ResidualDiagnostics {
  /// z - dhat + dt + dr, one per pair (empty for the l2 baseline).
  Eigen::VectorXd pair_residuals;
  /// dt_i^2 - ||p - t_i||^2 and dr_j^2 - ||p - r_j||^2.
  Eigen::VectorXd tx_residuals;
  Eigen::VectorXd rx_residuals;
  /// Max absolute entry over all constraint residuals.
  double constraint_norm = 0.0;
  double min_dt = 0.0;
  double min_dr = 0.0;
  /// Output neurons; for the l2 baseline the fitted residual dhat - dt - dr.
  Eigen::VectorXd z;
  /// Pair indices sorted by decreasing |z|: likely outliers first.
  std::vector<std::size_t> outlier_ranking;
};

ResidualDiagnostics residual_report(const SolverState& state,
                                    const ScaledProblem& problem,
                                    const SolverConfig& config);

struct TrajectorySample {
  long iteration = 0;
  SolverState state;
};

struct RunResult {
  Vec2 estimate = Vec2::Zero();  // meters
  long iterations = 0;
  bool converged = false;
  struct {
    double constraint_norm = 0.0;
    double update_norm = 0.0;
  } final_residuals;
  /// min(dt, dr) at the final state, internal units.
  double proposition_one_margin = 0.0;
  SolverState final_state;
  std::vector<TrajectorySample> trajectory;
};

/// Raised when the iteration produces a non-finite state.
class DivergedError : public Error {
 public:
  DivergedError(long iteration, SolverState last_finite);

  long iteration() const { return iteration_; }
  const SolverState& last_finite_state() const { return last_finite_; }

 private:
  long iteration_;
  SolverState last_finite_;
};

/// Runs the network from init_state until it settles or max_iters is hit.
/// A run that hits the cap is returned with converged = false. Throws
/// DivergedError on a non-finite state.
RunResult solve(const ScenarioGeometry& geometry,
                const MeasurementSet& measurements, const SolverConfig& config);

/// Same as above on an already scaled problem.
RunResult solve(const ScaledProblem& problem, const SolverConfig& config);

}  // namespace lpnnloc
