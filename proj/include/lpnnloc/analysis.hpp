// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include <Eigen/Core>

#include "lpnnloc/scene.hpp"
#include "lpnnloc/solver.hpp"

namespace lpnnloc::analysis {

struct CrlbResult {
  Eigen::Matrix2d fisher_info;       // m^-2
  Eigen::Matrix2d covariance_bound;  // m^2
  double rmse_bound = 0.0;           // m
};

/// Position-only Fisher information for i.i.d. Gaussian sum-range errors of
/// the given variance (m^2). Throws kTargetMissing, or kDegenerateGeometry
/// when the target sits on an antenna or the information matrix is singular.
CrlbResult crlb(const ScenarioGeometry& geometry, double gaussian_variance);

struct RankReport {
  /// Rows: the MN pair constraints, then the M transmitter and N receiver
  /// range constraints. Columns: p (2), z or u (MN), dt (M), dr (N).
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd singular_values;  // descending
  Eigen::Index numerical_rank = 0;
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
  /// dz/du (or dz/dz = 1) used in each pair row.
  Eigen::VectorXd g;
};

/// Gradients of the equality constraints at `state`. The pair-row entry is 1
/// for the kinds that carry z directly (the l2 baseline is treated in its z
/// form) and dz/du of the solver's threshold for the LCA kinds. Singular
/// values below maxDim * eps * sigma_max count as zero.
RankReport constraint_jacobian(const SolverState& state, const ScaledProblem& problem,
                               SolverKind kind);

/// sqrt(mean ||e - truth||^2). Throws kEmptyInput on an empty list.
double rmse(std::span<const Vec2> estimates, const Vec2& truth);

/// Lagrangian of the given kind in long double, excluding the sparsity
/// penalty of the LCA kinds. For those, z is taken as threshold(u).
long double lagrangian(const SolverState& state, const ScaledProblem& problem,
                       const SolverConfig& config);

/// Largest relative error |analytic - fd| / max(|fd|, 1) between dynamics()
/// and central differences (step h) of lagrangian(): minus the gradient for
/// variables, plus the gradient for multipliers. For the LCA kinds the u
/// entry is compared against -(dL/dz + u - z). Those kinds require every
/// ||u_k| - 1| > 1e-3 and throw kInvalidArgument otherwise.
double finite_diff_lagrangian_check(const SolverState& state,
                                    const ScaledProblem& problem,
                                    const SolverConfig& config, double h = 1e-6);

}  // namespace lpnnloc::analysis
