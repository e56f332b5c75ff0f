// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace lpnnloc {

using Vec2 = Eigen::Vector2d;

/// Antenna layout of a distributed MIMO radar, in meters.
struct ScenarioGeometry {
  std::vector<Vec2> transmitters;
  std::vector<Vec2> receivers;
  std::optional<Vec2> target;

  std::size_t m() const { return transmitters.size(); }
  std::size_t n() const { return receivers.size(); }
};

/// Flat index of the (transmitter i, receiver j) pair, zero based.
///
/// Entries are stacked transmitter-fastest: [d(1,1) .. d(M,1), d(1,2) ..],
/// i.e. k = M*j + i. In one-based notation this is k = M(j-1) + i.
constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t m) {
  return m * j + i;
}

/// Inverse of pair_index: (transmitter, receiver) for flat entry k.
constexpr std::pair<std::size_t, std::size_t> pair_of(std::size_t k,
                                                      std::size_t m) {
  return {k % m, k / m};
}

/// The MN observed (or true) sum-ranges, in meters, stacked per pair_index.
class MeasurementSet {
 public:
  MeasurementSet(std::size_t m, std::size_t n, std::vector<double> values);

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t k) const { return values_[k]; }
  double at(std::size_t i, std::size_t j) const {
    return values_[pair_index(i, j, m_)];
  }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> values_;
};

enum class NoiseKind { kGaussian, kNlosExponential, kLaplaceSinr };

enum class ContaminationMode { kNone, kOneAntenna, kOneTxOneRx, kExplicitEntries };

/// Which entries of the M x N measurement matrix receive outliers.
struct ContaminationPattern {
  ContaminationMode mode = ContaminationMode::kNone;
  /// Zero-based (transmitter, receiver) pairs; used only by kExplicitEntries.
  std::vector<std::pair<std::size_t, std::size_t>> entries;
};

/// Noise recipe. Gaussian noise is always applied; outliers are added on top
/// for the two contaminated kinds.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kGaussian;
  double gaussian_variance = 0.0;  // m^2
  double outlier_scale = 0.0;      // m, standard deviation of the outlier law
  ContaminationPattern contamination;
  std::uint64_t seed = 0;

  /// Throws Error(kConfigError) on negative variance/scale.
  void validate() const;
};

/// Noise-free sum-ranges ||p - t_i|| + ||p - r_j||.
/// Throws kTargetMissing without a target and kDegenerateGeometry when the
/// target coincides with an antenna.
MeasurementSet true_distances(const ScenarioGeometry& geometry);

/// Same as true_distances but allows a target sitting on an antenna.
MeasurementSet sum_ranges(const ScenarioGeometry& geometry, const Vec2& point);

/// Mask of entries that `spec` contaminates for one draw; true = outlier.
/// Random choices come from the spec's outlier substream, so the result
/// matches what apply_noise uses.
std::vector<bool> contamination_mask(const NoiseSpec& spec, std::size_t m,
                                     std::size_t n);

/// clean + Gaussian noise (+ outliers on the contaminated entries).
/// Gaussian draws and outlier draws use separate substreams of spec.seed, so
/// a contaminated realization differs from the Gaussian-only one exactly on
/// the contaminated entries.
MeasurementSet apply_noise(const MeasurementSet& clean, const NoiseSpec& spec);

struct StackedRanges {
  std::vector<double> dt;
  std::vector<double> dr;
};

/// Replicates per-antenna ranges into MN-vectors: dt[k] = dt_i, dr[k] = dr_j
/// with k = pair_index(i, j, M).
StackedRanges stack_ranges(std::span<const double> dt, std::span<const double> dr);

}  // namespace lpnnloc
