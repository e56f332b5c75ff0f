// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/scene.hpp"

#include <cmath>
#include <string>

#include "lpnnloc/error.hpp"
#include "lpnnloc/rng.hpp"

namespace lpnnloc {
namespace {

// Substream ids under NoiseSpec::seed.
constexpr std::uint64_t kGaussianStream = 0;
constexpr std::uint64_t kOutlierStream = 1;

}  // namespace

MeasurementSet::MeasurementSet(std::size_t m, std::size_t n,
                               std::vector<double> values)
    : m_(m), n_(n), values_(std::move(values)) {
  if (values_.size() != m_ * n_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "measurement set has " + std::to_string(values_.size()) +
                    " values, expected M*N = " + std::to_string(m_ * n_));
  }
}

void NoiseSpec::validate() const {
  if (!(gaussian_variance >= 0.0) || !std::isfinite(gaussian_variance)) {
    throw Error(ErrorCode::kConfigError,
                "noise.gaussianVariance must be a finite value >= 0");
  }
  if (!(outlier_scale >= 0.0) || !std::isfinite(outlier_scale)) {
    throw Error(ErrorCode::kConfigError,
                "noise.outlierScale must be a finite value >= 0");
  }
}

MeasurementSet sum_ranges(const ScenarioGeometry& geometry, const Vec2& point) {
  const std::size_t m = geometry.m();
  const std::size_t n = geometry.n();
  std::vector<double> values(m * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double to_rx = (point - geometry.receivers[j]).norm();
    for (std::size_t i = 0; i < m; ++i) {
      values[pair_index(i, j, m)] =
          (point - geometry.transmitters[i]).norm() + to_rx;
    }
  }
  return MeasurementSet(m, n, std::move(values));
}

MeasurementSet true_distances(const ScenarioGeometry& geometry) {
  if (!geometry.target) {
    throw Error(ErrorCode::kTargetMissing, "scenario has no target position");
  }
  const Vec2& p = *geometry.target;
  for (std::size_t i = 0; i < geometry.m(); ++i) {
    if ((p - geometry.transmitters[i]).norm() == 0.0) {
      throw Error(ErrorCode::kDegenerateGeometry,
                  "target coincides with transmitter " + std::to_string(i + 1));
    }
  }
  for (std::size_t j = 0; j < geometry.n(); ++j) {
    if ((p - geometry.receivers[j]).norm() == 0.0) {
      throw Error(ErrorCode::kDegenerateGeometry,
                  "target coincides with receiver " + std::to_string(j + 1));
    }
  }
  return sum_ranges(geometry, p);
}

namespace {

std::vector<bool> draw_mask(const NoiseSpec& spec, std::size_t m, std::size_t n,
                            rng::Stream& stream) {
  std::vector<bool> mask(m * n, false);
  const ContaminationPattern& pattern = spec.contamination;
  if (spec.kind == NoiseKind::kGaussian) return mask;
  switch (pattern.mode) {
    case ContaminationMode::kNone:
      break;
    case ContaminationMode::kOneAntenna: {
      const std::size_t antenna = stream.index(m + n);
      if (antenna < m) {
        for (std::size_t j = 0; j < n; ++j) mask[pair_index(antenna, j, m)] = true;
      } else {
        const std::size_t rx = antenna - m;
        for (std::size_t i = 0; i < m; ++i) mask[pair_index(i, rx, m)] = true;
      }
      break;
    }
    case ContaminationMode::kOneTxOneRx: {
      const std::size_t tx = stream.index(m);
      const std::size_t rx = stream.index(n);
      for (std::size_t j = 0; j < n; ++j) mask[pair_index(tx, j, m)] = true;
      for (std::size_t i = 0; i < m; ++i) mask[pair_index(i, rx, m)] = true;
      break;
    }
    case ContaminationMode::kExplicitEntries:
      for (const auto& [i, j] : pattern.entries) {
        if (i >= m || j >= n) {
          throw Error(ErrorCode::kPatternMismatch,
                      "contamination entry (" + std::to_string(i + 1) + ", " +
                          std::to_string(j + 1) + ") is outside the " +
                          std::to_string(m) + "x" + std::to_string(n) +
                          " measurement matrix");
        }
        mask[pair_index(i, j, m)] = true;
      }
      break;
  }
  return mask;
}

}  // namespace

std::vector<bool> contamination_mask(const NoiseSpec& spec, std::size_t m,
                                     std::size_t n) {
  rng::Stream stream(rng::derive_seed(spec.seed, {kOutlierStream}));
  return draw_mask(spec, m, n, stream);
}

MeasurementSet apply_noise(const MeasurementSet& clean, const NoiseSpec& spec) {
  spec.validate();
  const std::size_t m = clean.m();
  const std::size_t n = clean.n();
  std::vector<double> values(clean.values().begin(), clean.values().end());

  if (spec.gaussian_variance > 0.0) {
    rng::Stream gaussian(rng::derive_seed(spec.seed, {kGaussianStream}));
    const double sd = std::sqrt(spec.gaussian_variance);
    for (double& v : values) v += sd * gaussian.normal();
  }

  rng::Stream outliers(rng::derive_seed(spec.seed, {kOutlierStream}));
  const std::vector<bool> mask = draw_mask(spec, m, n, outliers);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!mask[k]) continue;
    switch (spec.kind) {
      case NoiseKind::kGaussian:
        break;
      case NoiseKind::kNlosExponential:
        values[k] += outliers.exponential(spec.outlier_scale);
        break;
      case NoiseKind::kLaplaceSinr:
        values[k] += outliers.laplace(spec.outlier_scale);
        break;
    }
  }
  return MeasurementSet(m, n, std::move(values));
}

StackedRanges stack_ranges(std::span<const double> dt, std::span<const double> dr) {
  const std::size_t m = dt.size();
  const std::size_t n = dr.size();
  StackedRanges out{std::vector<double>(m * n), std::vector<double>(m * n)};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      out.dt[pair_index(i, j, m)] = dt[i];
      out.dr[pair_index(i, j, m)] = dr[j];
    }
  }
  return out;
}

}  // namespace lpnnloc
