// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace lpnnloc::analysis {

CrlbResult crlb(const ScenarioGeometry& geometry, double gaussian_variance) {
  if (!geometry.target) {
    throw Error(ErrorCode::kTargetMissing, "crlb needs a target position");
  }
  if (!(gaussian_variance > 0.0) || !std::isfinite(gaussian_variance)) {
    throw Error(ErrorCode::kInvalidArgument,
                "gaussianVariance must be a finite positive number");
  }
  const Vec2 p = *geometry.target;
  auto unit = [&p](const Vec2& antenna, const char* what, std::size_t idx) {
    const Vec2 d = p - antenna;
    const double len = d.norm();
    if (!(len > 0.0)) {
      throw Error(ErrorCode::kDegenerateGeometry,
                  std::string("target coincides with ") + what + " " +
                      std::to_string(idx + 1));
    }
    return Vec2(d / len);
  };
  std::vector<Vec2> ut;
  std::vector<Vec2> ur;
  for (std::size_t i = 0; i < geometry.m(); ++i) {
    ut.push_back(unit(geometry.transmitters[i], "transmitter", i));
  }
  for (std::size_t j = 0; j < geometry.n(); ++j) {
    ur.push_back(unit(geometry.receivers[j], "receiver", j));
  }

  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
  for (const Vec2& a : ut) {
    for (const Vec2& b : ur) {
      const Vec2 g = a + b;
      info += g * g.transpose();
    }
  }
  info /= gaussian_variance;

  // Relative test so the decision does not depend on sigma.
  const double tr = info.trace();
  const double det = info.determinant();
  if (!(tr > 0.0) || det <= 1e-12 * tr * tr) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "Fisher information is singular for this geometry");
  }
  CrlbResult out;
  out.fisher_info = info;
  out.covariance_bound = info.inverse();
  out.rmse_bound = std::sqrt(out.covariance_bound.trace());
  return out;
}

RankReport constraint_jacobian(const SolverState& state, const ScaledProblem& problem,
                               SolverKind kind) {
  const auto m = static_cast<Eigen::Index>(problem.m);
  const auto n = static_cast<Eigen::Index>(problem.n);
  const Eigen::Index mn = m * n;
  if (state.dt.size() != m || state.dr.size() != n ||
      (uses_internal_state(kind) && state.zu.size() != mn)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "state does not match the problem dimensions");
  }

  RankReport out;
  out.g = Eigen::VectorXd::Ones(mn);
  if (uses_internal_state(kind)) {
    SolverConfig cfg;
    cfg.kind = kind;
    const thresholds::ThresholdParams params = cfg.threshold();
    for (Eigen::Index k = 0; k < mn; ++k) {
      out.g(k) = thresholds::threshold_jacobian_term(state.zu(k), params);
    }
  }

  const Eigen::Index rows = mn + m + n;
  const Eigen::Index cols = mn + m + n + 2;
  const Eigen::Index col_z = 2;
  const Eigen::Index col_dt = 2 + mn;
  const Eigen::Index col_dr = 2 + mn + m;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index k = m * j + i;
      jac(k, col_z + k) = out.g(k);
      jac(k, col_dt + i) = 1.0;
      jac(k, col_dr + j) = 1.0;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    jac.block<1, 2>(mn + i, 0) = (problem.tx.col(i) - state.p).transpose();
    jac(mn + i, col_dt + i) = 2.0 * state.dt(i);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    jac.block<1, 2>(mn + m + j, 0) = (problem.rx.col(j) - state.p).transpose();
    jac(mn + m + j, col_dr + j) = 2.0 * state.dr(j);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  out.singular_values = svd.singularValues();
  out.max_singular_value = out.singular_values(0);
  out.min_singular_value = out.singular_values(out.singular_values.size() - 1);
  const double cutoff = static_cast<double>(std::max(rows, cols)) *
                        std::numeric_limits<double>::epsilon() *
                        out.max_singular_value;
  out.numerical_rank = (out.singular_values.array() > cutoff).count();
  out.jacobian = std::move(jac);
  return out;
}

double rmse(std::span<const Vec2> estimates, const Vec2& truth) {
  if (estimates.empty()) {
    throw Error(ErrorCode::kEmptyInput, "rmse of an empty estimate list");
  }
  double sum = 0.0;
  for (const Vec2& e : estimates) sum += (e - truth).squaredNorm();
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

namespace {

using Real = long double;

// Flat copy of the state in extended precision. For the LCA kinds `z` holds
// the threshold output, not u.
struct Point {
  std::vector<Real> z, dt, dr, p, alpha, beta, lambda;

  std::vector<std::vector<Real>*> groups() {
    return {&z, &dt, &dr, &p, &alpha, &beta, &lambda};
  }
};

std::vector<Real> widen(const Eigen::VectorXd& v) {
  return std::vector<Real>(v.data(), v.data() + v.size());
}

Point to_point(const SolverState& s, const SolverConfig& config) {
  Point pt;
  pt.z = widen(output_z(s, config));
  pt.dt = widen(s.dt);
  pt.dr = widen(s.dr);
  pt.p = {s.p.x(), s.p.y()};
  pt.alpha = widen(s.alpha);
  pt.beta = widen(s.beta);
  pt.lambda = widen(s.lambda);
  return pt;
}

Real log_cosh(Real x) {
  const Real ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0L * ax)) - std::log(2.0L);
}

Real lagrangian_at(const Point& x, const ScaledProblem& pb, const SolverConfig& config) {
  const std::size_t m = pb.m;
  const std::size_t n = pb.n;
  const Real c = config.aug_c;
  Real objective = 0.0L;
  Real linear = 0.0L;
  Real squares = 0.0L;

  for (std::size_t i = 0; i < m; ++i) {
    const Real dx = x.p[0] - pb.tx(0, i);
    const Real dy = x.p[1] - pb.tx(1, i);
    const Real h = x.dt[i] * x.dt[i] - (dx * dx + dy * dy);
    linear += x.beta[i] * h;
    squares += h * h;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Real dx = x.p[0] - pb.rx(0, j);
    const Real dy = x.p[1] - pb.rx(1, j);
    const Real h = x.dr[j] * x.dr[j] - (dx * dx + dy * dy);
    linear += x.lambda[j] * h;
    squares += h * h;
  }

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = pair_index(i, j, m);
      const Real dhat = pb.dhat(static_cast<Eigen::Index>(k));
      if (config.kind == SolverKind::kL2Baseline) {
        const Real e = dhat - x.dt[i] - x.dr[j];
        objective += e * e;
        continue;
      }
      const Real r = x.z[k] - dhat + x.dt[i] + x.dr[j];
      linear += x.alpha[k] * r;
      squares += r * r;
      if (config.kind == SolverKind::kMethod1LogCosh) {
        const Real a = config.a_sharpness;
        objective += log_cosh(a * x.z[k]) / a;
      }
    }
  }
  return objective + linear + 0.5L * c * squares;
}

}  // namespace

long double lagrangian(const SolverState& state, const ScaledProblem& problem,
                       const SolverConfig& config) {
  return lagrangian_at(to_point(state, config), problem, config);
}

double finite_diff_lagrangian_check(const SolverState& state,
                                    const ScaledProblem& problem,
                                    const SolverConfig& config, double h) {
  if (uses_internal_state(config.kind)) {
    const double lam = config.threshold().lambda;
    for (Eigen::Index k = 0; k < state.zu.size(); ++k) {
      if (!(std::abs(std::abs(state.zu(k)) - lam) > 1e-3)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "u entry " + std::to_string(k) + " is within 1e-3 of the threshold");
      }
    }
  }
  const StateDerivative analytic = dynamics(state, problem, config);
  const Point base = to_point(state, config);
  const Eigen::VectorXd z = output_z(state, config);

  const std::vector<const Eigen::VectorXd*> analytic_groups = {
      &analytic.zu, &analytic.dt, &analytic.dr, nullptr,
      &analytic.alpha, &analytic.beta, &analytic.lambda};
  // Multipliers ascend the Lagrangian, variables descend it.
  const std::array<Real, 7> sign = {-1, -1, -1, -1, 1, 1, 1};

  double worst = 0.0;
  Point probe = base;
  auto groups = probe.groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<Real>& v = *groups[g];
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Real saved = v[k];
      v[k] = saved + h;
      const Real up = lagrangian_at(probe, problem, config);
      v[k] = saved - h;
      const Real down = lagrangian_at(probe, problem, config);
      v[k] = saved;
      const Real grad = (up - down) / (2.0L * static_cast<Real>(h));

      Real expected = sign[g] * grad;
      if (g == 0 && uses_internal_state(config.kind)) {
        expected -= thresholds::penalty_gradient(state.zu(static_cast<Eigen::Index>(k)),
                                                 z(static_cast<Eigen::Index>(k)));
      }
      const double got = g == 3 ? analytic.p(static_cast<Eigen::Index>(k))
                                : (*analytic_groups[g])(static_cast<Eigen::Index>(k));
      const double fd = static_cast<double>(expected);
      worst = std::max(worst, std::abs(got - fd) / std::max(std::abs(fd), 1.0));
    }
  }
  return worst;
}

}  // namespace lpnnloc::analysis
