// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/rng.hpp"

#include <cmath>
#include <numbers>

namespace lpnnloc::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master;
  std::uint64_t seed = splitmix64(state);
  for (std::uint64_t coordinate : path) {
    // Fold each coordinate in, then remix so (a, b) and (b, a) differ.
    state = seed ^ (coordinate * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL);
    seed = splitmix64(state);
  }
  return seed;
}

double Stream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open0() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double Stream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::size_t Stream::index(std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

double Stream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open0()));
  const double angle = 2.0 * std::numbers::pi * uniform01();
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Stream::exponential(double mean) {
  return -mean * std::log(uniform_open0());
}

double Stream::laplace(double sd) {
  const double scale = sd / std::numbers::sqrt2;
  // Inverse CDF on a symmetric uniform in (-1/2, 1/2].
  const double v = uniform_open0() - 0.5;
  return v < 0.0 ? scale * std::log1p(2.0 * v) : -scale * std::log1p(-2.0 * v);
}

}  // namespace lpnnloc::rng
