// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/thresholds.hpp"

#include <cmath>

#include "lpnnloc/error.hpp"

namespace lpnnloc::thresholds {

void ThresholdParams::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold delta must lie in [0, 1]");
  }
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold lambda must be positive");
  }
  if (!(eta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold eta must be positive");
  }
}

double logistic(double x) {
  // Beyond these points the result rounds to exactly 1 or 0 anyway.
  if (x > 40.0) return 1.0;
  if (x < -746.0) return 0.0;
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double soft_threshold(double u, double lambda) {
  if (std::abs(u) <= lambda) return 0.0;
  return u > 0.0 ? u - lambda : u + lambda;
}

double hard_threshold(double u, double lambda) {
  return std::abs(u) <= lambda ? 0.0 : u;
}

double general_threshold(double u, const ThresholdParams& params) {
  const double mag = std::abs(u);
  if (params.infinite()) {
    if (params.delta == 1.0) return soft_threshold(u, params.lambda);
    if (params.delta == 0.0) return hard_threshold(u, params.lambda);
    if (mag <= params.lambda) return 0.0;
    return std::copysign(mag - params.delta * params.lambda, u);
  }
  if (u == 0.0) return 0.0;
  const double gate = logistic(params.eta * (mag - params.lambda));
  // Not copysign: (mag - delta*lambda) is negative inside the dead zone.
  return (u > 0.0 ? 1.0 : -1.0) * (mag - params.delta * params.lambda) * gate;
}

double threshold_jacobian_term(double u, const ThresholdParams& params) {
  const double mag = std::abs(u);
  if (params.infinite()) return mag > params.lambda ? 1.0 : 0.0;
  const double gate = logistic(params.eta * (mag - params.lambda));
  // d/dx logistic(x) = s (1 - s); 1 - s is logistic(-x), computed directly to
  // keep precision when s rounds to 1.
  const double slope = gate * logistic(-params.eta * (mag - params.lambda));
  return gate + params.eta * (mag - params.delta * params.lambda) * slope;
}

}  // namespace lpnnloc::thresholds
