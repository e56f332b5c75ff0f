// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace lpnnloc::rng {

/// Name written into experiment metadata so runs can be reproduced elsewhere.
inline constexpr const char* kGeneratorName =
    "mt19937_64, seeded by splitmix64 substream derivation";

/// One splitmix64 output; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent substream seed from a master seed and a path of
/// stream coordinates, e.g. {trial, purpose}. Equal inputs give equal seeds on
/// every platform.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

/// Random stream with portable variate generation.
///
/// The standard library distributions are implementation-defined, so the
/// transforms here are written out against the raw 64-bit engine output. Two
/// streams built from the same seed produce bit-identical sequences with any
/// conforming compiler.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  /// Uniform in (0, 1]; safe to pass to log().
  double uniform_open0();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). Uses rejection, so no modulo bias.
  std::size_t index(std::size_t n);
  /// Standard normal via Box-Muller; both outputs of a pair are used.
  double normal();
  /// Exponential with the given mean (its standard deviation equals the mean).
  double exponential(double mean);
  /// Zero-mean Laplace with the given standard deviation (scale sd / sqrt(2)).
  double laplace(double sd);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lpnnloc::rng
