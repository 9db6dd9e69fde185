// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "funcgnn/error.hpp"

namespace funcgnn {

/// Deterministic random source used everywhere randomness is needed.
///
/// The generator is SplitMix64 (Steele, Lea and Flood, "Fast splittable
/// pseudorandom number generators"). The 64-bit state advances by the
/// golden-ratio increment and each output applies an avalanche finalizer
/// to the new state:
///
///   state += 0x9E3779B97F4A7C15
///   z  = state
///   z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   out = z ^ (z >> 31)
///
/// Every derived draw is defined on top of next_u64() exactly as documented
/// on each method, so an independent implementation of this header
/// reproduces identical streams bit for bit. std::uniform_int_distribution
/// and friends are deliberately avoided; their outputs differ between
/// standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1): the top 53 bits of next_u64() scaled by 2^-53.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exact uniform integer in [0, bound). Rejection sampling: draw u64 values
  /// until one is >= 2^64 mod bound, then reduce modulo bound.
  uint64_t below(uint64_t bound) {
    if (bound == 0) raise(ErrorKind::InvalidParams, "below(0) is undefined");
    uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    uint64_t u;
    do {
      u = next_u64();
    } while (u < threshold);
    return u % bound;
  }

  /// True with probability p: next_double() < p.
  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform double in [lo, hi): lo + (hi - lo) * next_double().
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  uint64_t state_;
};

/// Stable seed derivation for independent sub-streams: one SplitMix64 output
/// of a generator seeded with seed XOR (salt * golden ratio increment).
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
  SplitMix64 g(seed ^ (salt * 0x9E3779B97F4A7C15ULL));
  return g.next_u64();
}

/// Fisher-Yates shuffle: for i = n-1 down to 1, swap items i and below(i + 1).
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace funcgnn
