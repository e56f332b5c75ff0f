// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include <gtest/gtest.h>

#include "lpnnloc/error.hpp"
#include "lpnnloc/experiment.hpp"
#include "lpnnloc/rng.hpp"
#include "lpnnloc/solver.hpp"

#define EXPECT_LPNN_ERROR(stmt, expected_code)                       \
  do {                                                               \
    try {                                                            \
      stmt;                                                          \
      ADD_FAILURE() << "no exception from " #stmt;                   \
    } catch (const ::lpnnloc::Error& e_) {                           \
      EXPECT_EQ(e_.code(), expected_code) << e_.what();              \
    }                                                                \
  } while (0)

namespace lpnnloc::testing {

inline ScaledProblem clean_reference_problem(double length_scale = kDefaultLengthScale) {
  const ScenarioGeometry g = reference_geometry();
  return ScaledProblem::make(g, true_distances(g), length_scale);
}

/// Network state sitting exactly on the noise-free solution with zero
/// multipliers and zero sparse residual.
inline SolverState ground_truth_state(const ScaledProblem& pr, SolverKind kind,
                                      const Vec2& target_m) {
  SolverState s;
  s.p = target_m / pr.length_scale;
  s.dt.resize(static_cast<Eigen::Index>(pr.m));
  s.dr.resize(static_cast<Eigen::Index>(pr.n));
  for (Eigen::Index i = 0; i < s.dt.size(); ++i) s.dt[i] = (s.p - pr.tx.col(i)).norm();
  for (Eigen::Index j = 0; j < s.dr.size(); ++j) s.dr[j] = (s.p - pr.rx.col(j)).norm();
  const auto k = static_cast<Eigen::Index>(pr.pairs());
  if (kind != SolverKind::kL2Baseline) {
    s.zu = Eigen::VectorXd::Zero(k);
    s.alpha = Eigen::VectorXd::Zero(k);
  }
  s.beta = Eigen::VectorXd::Zero(s.dt.size());
  s.lambda = Eigen::VectorXd::Zero(s.dr.size());
  return s;
}

/// Random state of plausible magnitude. u entries avoid the threshold kinks.
inline SolverState random_state(const ScaledProblem& pr, SolverKind kind, rng::Stream& r) {
  SolverState s = ground_truth_state(pr, kind, Vec2::Zero());
  s.p = Vec2(r.uniform(-1, 1), r.uniform(-1, 1));
  for (Eigen::Index i = 0; i < s.dt.size(); ++i) s.dt[i] = r.uniform(0.2, 3);
  for (Eigen::Index j = 0; j < s.dr.size(); ++j) s.dr[j] = r.uniform(0.2, 3);
  for (Eigen::Index k = 0; k < s.zu.size(); ++k) {
    double u = 0.0;
    do {
      u = r.uniform(-3, 3);
    } while (std::abs(std::abs(u) - 1.0) <= 2e-3);
    s.zu[k] = u;
    s.alpha[k] = r.uniform(-1, 1);
  }
  for (Eigen::Index i = 0; i < s.beta.size(); ++i) s.beta[i] = r.uniform(-1, 1);
  for (Eigen::Index j = 0; j < s.lambda.size(); ++j) s.lambda[j] = r.uniform(-1, 1);
  return s;
}

inline SolverConfig config_for(SolverKind kind) {
  SolverConfig c;
  c.kind = kind;
  return c;
}

}  // namespace lpnnloc::testing
