// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/error.hpp"

namespace lpnnloc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTargetMissing: return "TargetMissing";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kPatternMismatch: return "PatternMismatch";
    case ErrorCode::kUnderdeterminedScenario: return "UnderdeterminedScenario";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace lpnnloc
