// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "funcgnn/aig.hpp"

namespace funcgnn {

/// Bit-parallel pattern storage: 64 assignments per word. Pattern t of
/// input i lives at bit (t % 64) of words[i * words_per_input() + t / 64].
/// Bits beyond `count` in the last word of each row stay zero.
struct PatternSet {
  int32_t num_inputs = 0;
  uint64_t count = 0;
  std::vector<uint64_t> words;

  size_t words_per_input() const { return static_cast<size_t>((count + 63) / 64); }
  bool bit(int32_t input, uint64_t t) const {
    return (words[static_cast<size_t>(input) * words_per_input() + t / 64] >> (t % 64)) & 1;
  }
  void set_bit(int32_t input, uint64_t t, bool value);

  static PatternSet make(int32_t num_inputs, uint64_t count);
  /// rows[t][i] is the value of input i under pattern t.
  static PatternSet from_rows(const std::vector<std::vector<uint8_t>>& rows, int32_t num_inputs);

  /// All 2^num_inputs assignments in ascending binary order: pattern t sets
  /// input i to bit i of t.
  static PatternSet exhaustive(int32_t num_inputs);
  /// `count` words drawn from SplitMix64(seed), input-major, tails masked.
  static PatternSet random(int32_t num_inputs, uint64_t count, uint64_t seed);
};

/// Output column of one node over a pattern set, same bit layout as one
/// PatternSet row.
struct TruthTable {
  uint64_t pattern_count = 0;
  std::vector<uint64_t> bits;

  uint64_t ones() const;
};

struct LabelMode {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  uint64_t seed = 0;
  uint64_t pattern_count = 0;
};

/// Per-node signal probabilities plus the truth tables they were computed
/// from. Both views always describe the same pattern set.
struct LabelSet {
  std::vector<double> node_probs;
  std::vector<TruthTable> tables;
  LabelMode mode;
};

struct PairLabel {
  int32_t i = 0;
  int32_t j = 0;
  double tt_distance = 0.0;
};

/// Evaluates every node of a well-formed Aig over the given patterns.
/// Throws ShapeMismatch when the pattern width disagrees with the input
/// count.
std::vector<TruthTable> simulate_patterns(const Aig& aig, const PatternSet& patterns);

/// Exhaustive labels over all 2^I patterns. Throws TooManyInputs past the
/// cap (default 16, i.e. at most 65536 patterns).
LabelSet exact_labels(const Aig& aig, int32_t exact_input_cap = 16);

/// Monte Carlo labels over n_vectors seeded patterns. Same (aig, n, seed)
/// always yields the same label set.
LabelSet mc_labels(const Aig& aig, uint64_t n_vectors, uint64_t seed);

/// Normalized Hamming distance between two tables of equal pattern count.
double tt_distance(const TruthTable& a, const TruthTable& b);

/// Draws min(k, N choose 2) distinct unordered node pairs uniformly without
/// replacement (Floyd's algorithm over the pair index space) and labels each
/// with its truth-table distance. Requires at least two nodes.
std::vector<PairLabel> sample_pairs(const Aig& aig, const LabelSet& labels, uint64_t k,
                                    uint64_t seed);

/// (x - mean) / population standard deviation. Falls back to mean removal
/// alone when the deviation is below 1e-12. Needs at least two values.
std::vector<double> zero_norm(std::span<const double> values);

}  // namespace funcgnn
