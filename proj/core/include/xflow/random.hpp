//===- xflow/random.hpp - Portable random draws -----------------*- C++ -*-===//
//
// Part of the xflow project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The standard distributions are implementation defined, so artifacts that
// must be bit-reproducible draw through these helpers instead.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace xflow {

using Rng = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Rng &rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do
    x = rng();
  while (x >= limit);
  return x % n;
}

template <class It> void shuffle(It first, It last, Rng &rng) {
  for (auto n = last - first; n > 1; --n) {
    auto j = static_cast<decltype(n)>(
        uniform_below(rng, static_cast<std::uint64_t>(n)));
    using std::swap;
    swap(first[n - 1], first[j]);
  }
}

} // namespace xflow
