// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>

namespace lpnnloc::thresholds {

inline constexpr double kInfiniteEta = std::numeric_limits<double>::infinity();

/// Parameters of the general LCA threshold: transition rate eta, adjustment
/// fraction delta and threshold level lambda.
struct ThresholdParams {
  double eta = kInfiniteEta;
  double delta = 1.0;
  double lambda = 1.0;

  bool infinite() const { return eta == kInfiniteEta; }
  /// Throws Error(kInvalidArgument) unless delta in [0,1], lambda > 0, eta > 0.
  void validate() const;

  /// Exact soft threshold, the l1 setting.
  static constexpr ThresholdParams soft(double lambda = 1.0) {
    return {kInfiniteEta, 1.0, lambda};
  }
  /// Smooth proxy of the hard threshold used for the l0-like objective.
  static constexpr ThresholdParams l0_proxy() { return {10000.0, 0.0, 1.0}; }
};

/// 0 for |u| <= lambda, u - lambda*sign(u) otherwise.
double soft_threshold(double u, double lambda);

/// 0 for |u| <= lambda, u otherwise.
double hard_threshold(double u, double lambda);

/// sign(u) (|u| - delta*lambda) / (1 + exp(-eta (|u| - lambda))).
///
/// The logistic factor is evaluated in its overflow-free form, so eta = 1e4 is
/// finite everywhere. Infinite eta dispatches to soft (delta = 1) or hard
/// (delta = 0) thresholding; other deltas use the eta -> inf limit of the
/// formula.
double general_threshold(double u, const ThresholdParams& params);

/// u - z. This is lambda * dS/dz for the penalty S implied by the threshold,
/// and the only way the penalty enters the dynamics.
inline double penalty_gradient(double u, double z) { return u - z; }

/// dz/du of general_threshold. For infinite eta returns the derivative of the
/// exact threshold away from its jump: 0 inside the dead zone, 1 outside.
double threshold_jacobian_term(double u, const ThresholdParams& params);

/// Numerically stable 1 / (1 + exp(-x)).
double logistic(double x);

}  // namespace lpnnloc::thresholds
