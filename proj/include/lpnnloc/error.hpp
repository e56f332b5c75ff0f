// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace lpnnloc {

enum class ErrorCode {
  kTargetMissing,
  kDegenerateGeometry,
  kPatternMismatch,
  kUnderdeterminedScenario,
  kDimensionMismatch,
  kNonFiniteState,
  kDiverged,
  kEmptyInput,
  kConfigError,
  kIoError,
  kInvalidArgument,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The C API maps
/// `code()` onto its integer status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lpnnloc
