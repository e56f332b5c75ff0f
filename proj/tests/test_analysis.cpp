// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "lpnnloc/analysis.hpp"
#include "lpnnloc/experiment.hpp"
#include "test_util.hpp"

namespace lpnnloc {
namespace {

using testing::clean_reference_problem;
using testing::config_for;
using testing::ground_truth_state;
using testing::random_state;

const Vec2 kTarget(-2000, 1000);

TEST(Crlb, ReferenceValueAtSigmaTen) {
  const analysis::CrlbResult r = analysis::crlb(reference_geometry(), 100.0);
  // Frozen from a 50-digit finite-difference evaluation of the Fisher matrix.
  EXPECT_NEAR(r.rmse_bound, 3.631116816295908, 1e-12);
  EXPECT_NEAR(r.covariance_bound(0, 0), 6.354952775, 1e-8);
  EXPECT_NEAR(r.covariance_bound(0, 1), 0.221518041, 1e-8);
  EXPECT_NEAR(r.covariance_bound(1, 0), 0.221518041, 1e-8);
  EXPECT_NEAR(r.covariance_bound(1, 1), 6.830056558, 1e-8);
  EXPECT_NEAR((r.fisher_info * r.covariance_bound - Eigen::Matrix2d::Identity()).norm(), 0,
              1e-12);
}

TEST(Crlb, ExtendedGeometry) {
  EXPECT_NEAR(analysis::crlb(extended_geometry(), 100.0).rmse_bound, 2.851041076121543, 1e-12);
}

TEST(Crlb, ScalesWithSigma) {
  const ScenarioGeometry g = reference_geometry();
  for (double sigma : {1.0, 3.0, 10.0, 100.0}) {
    const double a = analysis::crlb(g, sigma * sigma).rmse_bound;
    const double b = analysis::crlb(g, 4 * sigma * sigma).rmse_bound;
    EXPECT_NEAR(b / a, 2.0, 1e-13);
  }
}

TEST(Crlb, RigidMotionInvariance) {
  const ScenarioGeometry g = reference_geometry();
  const double base = analysis::crlb(g, 100.0).rmse_bound;
  for (double angle : {0.3, 1.7, -2.2}) {
    const Eigen::Matrix2d rot = Eigen::Rotation2Dd(angle).toRotationMatrix();
    const Vec2 shift(1234.5, -987.0);
    ScenarioGeometry h = g;
    for (Vec2& t : h.transmitters) t = rot * t + shift;
    for (Vec2& r : h.receivers) r = rot * r + shift;
    h.target = rot * *g.target + shift;
    const analysis::CrlbResult moved = analysis::crlb(h, 100.0);
    EXPECT_NEAR(moved.rmse_bound, base, 1e-9);
    const Eigen::Matrix2d back =
        rot.transpose() * moved.covariance_bound * rot - analysis::crlb(g, 100.0).covariance_bound;
    EXPECT_LT(back.norm(), 1e-9);
  }
}

TEST(Crlb, Errors) {
  ScenarioGeometry single;
  single.transmitters = {{0, 0}};
  single.receivers = {{0, 0}};
  single.target = Vec2(3, 4);
  EXPECT_LPNN_ERROR(analysis::crlb(single, 1.0), ErrorCode::kDegenerateGeometry);
  ScenarioGeometry g = reference_geometry();
  g.target.reset();
  EXPECT_LPNN_ERROR(analysis::crlb(g, 1.0), ErrorCode::kTargetMissing);
  EXPECT_LPNN_ERROR(analysis::crlb(reference_geometry(), 0.0), ErrorCode::kInvalidArgument);
  g = reference_geometry();
  g.target = g.transmitters[0];
  EXPECT_LPNN_ERROR(analysis::crlb(g, 1.0), ErrorCode::kDegenerateGeometry);
}

TEST(Rmse, Examples) {
  const Vec2 truth(1, 2);
  const std::vector<Vec2> same(5, truth);
  EXPECT_EQ(analysis::rmse(same, truth), 0.0);
  const std::vector<Vec2> pm = {truth + Vec2(3, 0), truth - Vec2(3, 0)};
  EXPECT_DOUBLE_EQ(analysis::rmse(pm, truth), 3.0);
  EXPECT_LPNN_ERROR(analysis::rmse(std::vector<Vec2>{}, truth), ErrorCode::kEmptyInput);
}

TEST(Rmse, GaussianCloud) {
  rng::Stream r(12);
  std::vector<Vec2> pts;
  for (int k = 0; k < 10000; ++k) pts.emplace_back(10 * r.normal(), 10 * r.normal());
  EXPECT_NEAR(analysis::rmse(pts, Vec2::Zero()), 10 * std::numbers::sqrt2, 0.02 * 10 * std::numbers::sqrt2);
}

TEST(Rmse, PermutationAndScale) {
  rng::Stream r(13);
  std::vector<Vec2> pts;
  for (int k = 0; k < 50; ++k) pts.emplace_back(r.uniform(-5, 5), r.uniform(-5, 5));
  const Vec2 truth(0.5, -0.25);
  const double base = analysis::rmse(pts, truth);
  std::vector<Vec2> rev(pts.rbegin(), pts.rend());
  EXPECT_NEAR(analysis::rmse(rev, truth), base, 1e-14);
  std::vector<Vec2> scaled;
  for (const Vec2& p : pts) scaled.push_back(3.0 * p);
  EXPECT_NEAR(analysis::rmse(scaled, 3.0 * truth), 3.0 * base, 1e-12);
}

class LagrangianFd : public ::testing::TestWithParam<SolverKind> {};

TEST_P(LagrangianFd, RandomStates) {
  const SolverKind kind = GetParam();
  const ScenarioGeometry g = reference_geometry();
  NoiseSpec spec;
  spec.gaussian_variance = 100;
  spec.seed = 1;
  const ScaledProblem pr =
      ScaledProblem::make(g, apply_noise(true_distances(g), spec), kDefaultLengthScale);
  const SolverConfig c = config_for(kind);
  rng::Stream r(100 + static_cast<int>(kind));
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const SolverState s = random_state(pr, kind, r);
    worst = std::max(worst, analysis::finite_diff_lagrangian_check(s, pr, c));
  }
  EXPECT_LE(worst, 1e-6) << to_string(kind);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, LagrangianFd, ::testing::ValuesIn(kAllSolverKinds),
                         [](const auto& info) {
                           std::string s = to_string(info.param);
                           for (char& ch : s) ch = ch == '-' ? '_' : ch;
                           return s;
                         });

TEST(LagrangianFd, QuadraticToyIsExact) {
  // With C ~ 0 the l2 Lagrangian is quadratic, so central differences are
  // exact up to rounding.
  const ScaledProblem pr = clean_reference_problem();
  SolverConfig c = config_for(SolverKind::kL2Baseline);
  c.aug_c = 1e-300;
  rng::Stream r(14);
  for (int rep = 0; rep < 20; ++rep) {
    const SolverState s = random_state(pr, SolverKind::kL2Baseline, r);
    EXPECT_LE(analysis::finite_diff_lagrangian_check(s, pr, c), 1e-10);
  }
}

TEST(LagrangianFd, RejectsKinkStates) {
  const ScaledProblem pr = clean_reference_problem();
  SolverState s = ground_truth_state(pr, SolverKind::kMethod2LcaL1, kTarget);
  s.zu[0] = 1.0002;
  EXPECT_LPNN_ERROR(
      analysis::finite_diff_lagrangian_check(s, pr, config_for(SolverKind::kMethod2LcaL1)),
      ErrorCode::kInvalidArgument);
}

TEST(ConstraintJacobian, FullRankAtGroundTruth) {
  const ScaledProblem pr = clean_reference_problem();
  for (SolverKind kind : {SolverKind::kL2Baseline, SolverKind::kMethod1LogCosh}) {
    const analysis::RankReport rep =
        analysis::constraint_jacobian(ground_truth_state(pr, kind, kTarget), pr, kind);
    EXPECT_EQ(rep.jacobian.rows(), 24);
    EXPECT_EQ(rep.jacobian.cols(), 2 + 16 + 4 + 4);
    EXPECT_EQ(rep.numerical_rank, 24);
    EXPECT_GT(rep.min_singular_value, 1e-8 * rep.max_singular_value);
    EXPECT_EQ(rep.g, Eigen::VectorXd::Ones(16));
  }
}

TEST(ConstraintJacobian, TargetOnTransmitterZeroesItsPositionBlock) {
  const ScaledProblem pr = clean_reference_problem();
  const ScenarioGeometry g = reference_geometry();
  const analysis::RankReport rep = analysis::constraint_jacobian(
      ground_truth_state(pr, SolverKind::kMethod1LogCosh, g.transmitters[0]), pr,
      SolverKind::kMethod1LogCosh);
  EXPECT_LE(rep.jacobian.block(16, 0, 1, 2).norm(), 1e-15);
  EXPECT_LE(rep.numerical_rank, 24);
}

TEST(ConstraintJacobian, UsesThresholdSlopeForLca) {
  const ScaledProblem pr = clean_reference_problem();
  SolverState s = ground_truth_state(pr, SolverKind::kMethod2LcaL0, kTarget);
  s.zu.setConstant(2.0);
  s.zu[0] = 0.2;
  const analysis::RankReport rep =
      analysis::constraint_jacobian(s, pr, SolverKind::kMethod2LcaL0);
  const auto params = config_for(SolverKind::kMethod2LcaL0).threshold();
  for (Eigen::Index k = 0; k < 16; ++k) {
    EXPECT_EQ(rep.g[k], thresholds::threshold_jacobian_term(s.zu[k], params));
  }
  EXPECT_NEAR(rep.g[1], 1.0, 1e-12);
}

TEST(ConstraintJacobian, LcaL0ConvergedStateIsRegular) {
  const ScenarioGeometry g = reference_geometry();
  SolverConfig c = config_for(SolverKind::kMethod2LcaL0);
  c.max_iters = 20000000;
  const RunResult res = solve(g, true_distances(g), c);
  ASSERT_TRUE(res.converged);
  const ScaledProblem pr = ScaledProblem::make(g, true_distances(g), c.length_scale);
  const analysis::RankReport rep =
      analysis::constraint_jacobian(res.final_state, pr, SolverKind::kMethod2LcaL0);
  for (Eigen::Index k = 0; k < 16; ++k) EXPECT_GT(rep.g[k], 0.0) << "pair " << k;
  EXPECT_EQ(rep.numerical_rank, 24);
}

}  // namespace
}  // namespace lpnnloc
