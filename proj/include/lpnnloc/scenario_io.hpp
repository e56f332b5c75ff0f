// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lpnnloc/error.hpp"
#include "lpnnloc/scene.hpp"

namespace lpnnloc {

/// A scenario file: geometry, an optional noise recipe and optionally the
/// observed sum-ranges themselves.
///
///   {
///     "transmitters": [[x, y], ...],
///     "receivers": [[x, y], ...],
///     "target": [x, y],
///     "noise": {
///       "kind": "gaussian" | "nlos_exponential" | "laplace_sinr",
///       "gaussianVariance": 100,
///       "outlierScale": 1000,
///       "contamination": {"mode": "none" | "one_antenna" | "one_tx_one_rx"
///                                 | "explicit",
///                         "entries": [[1, 2], [2, 3]]},
///       "seed": 7
///     },
///     "measurements": [d_11, d_21, ..., d_MN]
///   }
///
/// Lengths are meters. Contamination entries are 1-based (transmitter,
/// receiver) pairs. Measurements follow the index k = M*(j-1) + i.
struct Scenario {
  ScenarioGeometry geometry;
  std::optional<NoiseSpec> noise;
  std::optional<MeasurementSet> measurements;

  /// The explicit measurements if given, otherwise the true sum-ranges with
  /// `noise` applied (or clean if there is no noise section).
  MeasurementSet observed() const;
};

/// Throws Error(kConfigError) whose message names the offending field.
Scenario parse_scenario_json(std::string_view text);
/// As above; a missing or unreadable file is kIoError.
Scenario load_scenario_file(const std::filesystem::path& path);

/// Serializes back to the file format. Contamination entries come out 1-based.
std::string scenario_to_json(const Scenario& scenario);

const char* to_string(NoiseKind kind);
const char* to_string(ContaminationMode mode);

}  // namespace lpnnloc
