// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "funcgnn/error.hpp"
#include "funcgnn/rng.hpp"

namespace funcgnn {

namespace {

uint64_t tail_mask(uint64_t count) {
  const uint64_t rem = count % 64;
  return rem == 0 ? ~uint64_t{0} : (uint64_t{1} << rem) - 1;
}

// Bit b of mask k is bit k of the pattern index b, for the 64 patterns of
// one aligned word.
constexpr uint64_t kIndexBitMask[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

}  // namespace

void PatternSet::set_bit(int32_t input, uint64_t t, bool value) {
  uint64_t& word = words[static_cast<size_t>(input) * words_per_input() + t / 64];
  const uint64_t bit = uint64_t{1} << (t % 64);
  if (value)
    word |= bit;
  else
    word &= ~bit;
}

PatternSet PatternSet::make(int32_t num_inputs, uint64_t count) {
  PatternSet p;
  p.num_inputs = num_inputs;
  p.count = count;
  p.words.assign(static_cast<size_t>(num_inputs) * p.words_per_input(), 0);
  return p;
}

PatternSet PatternSet::from_rows(const std::vector<std::vector<uint8_t>>& rows,
                                 int32_t num_inputs) {
  PatternSet p = make(num_inputs, rows.size());
  for (uint64_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != static_cast<size_t>(num_inputs))
      raise(ErrorKind::ShapeMismatch, "pattern row " + std::to_string(t) + " has " +
                                          std::to_string(rows[t].size()) + " bits, expected " +
                                          std::to_string(num_inputs));
    for (int32_t i = 0; i < num_inputs; ++i)
      if (rows[t][static_cast<size_t>(i)]) p.set_bit(i, t, true);
  }
  return p;
}

PatternSet PatternSet::exhaustive(int32_t num_inputs) {
  if (num_inputs < 0 || num_inputs >= 63)
    raise(ErrorKind::InvalidParams, "exhaustive pattern count overflows");
  PatternSet p = make(num_inputs, uint64_t{1} << num_inputs);
  const size_t w = p.words_per_input();
  const uint64_t mask = tail_mask(p.count);
  for (int32_t i = 0; i < num_inputs; ++i) {
    for (size_t k = 0; k < w; ++k) {
      uint64_t word;
      if (i < 6)
        word = kIndexBitMask[i];
      else
        word = ((k >> (i - 6)) & 1) ? ~uint64_t{0} : uint64_t{0};
      if (k + 1 == w) word &= mask;
      p.words[static_cast<size_t>(i) * w + k] = word;
    }
  }
  return p;
}

PatternSet PatternSet::random(int32_t num_inputs, uint64_t count, uint64_t seed) {
  if (count == 0) raise(ErrorKind::InvalidParams, "empty pattern set");
  PatternSet p = make(num_inputs, count);
  SplitMix64 rng(seed);
  const size_t w = p.words_per_input();
  const uint64_t mask = tail_mask(count);
  for (int32_t i = 0; i < num_inputs; ++i)
    for (size_t k = 0; k < w; ++k)
      p.words[static_cast<size_t>(i) * w + k] = rng.next_u64() & (k + 1 == w ? mask : ~uint64_t{0});
  return p;
}

uint64_t TruthTable::ones() const {
  uint64_t total = 0;
  for (uint64_t w : bits) total += static_cast<uint64_t>(std::popcount(w));
  return total;
}

std::vector<TruthTable> simulate_patterns(const Aig& aig, const PatternSet& patterns) {
  if (patterns.num_inputs != aig.num_inputs)
    raise(ErrorKind::ShapeMismatch, "pattern set has " + std::to_string(patterns.num_inputs) +
                                        " inputs, circuit has " + std::to_string(aig.num_inputs));
  {
    std::vector<std::string> violations = validate(aig);
    if (!violations.empty())
      raise(ErrorKind::InvalidParams, "aig does not validate: " + violations.front());
  }

  const size_t w = patterns.words_per_input();
  const uint64_t mask = tail_mask(patterns.count);
  const int32_t n = aig.num_nodes();
  std::vector<TruthTable> tables(static_cast<size_t>(n));
  for (int32_t v = 0; v < n; ++v) {
    TruthTable& t = tables[static_cast<size_t>(v)];
    t.pattern_count = patterns.count;
    t.bits.resize(w);
    if (aig.kind(v) == NodeKind::Input) {
      const uint64_t* row = patterns.words.data() + static_cast<size_t>(v) * w;
      std::copy(row, row + w, t.bits.begin());
      if (w > 0) t.bits[w - 1] &= mask;
    } else {
      const auto& fs = aig.and_fanins(v);
      const std::vector<uint64_t>& a = tables[static_cast<size_t>(fs[0].src)].bits;
      const std::vector<uint64_t>& b = tables[static_cast<size_t>(fs[1].src)].bits;
      const uint64_t flip_a = fs[0].sign < 0 ? ~uint64_t{0} : 0;
      const uint64_t flip_b = fs[1].sign < 0 ? ~uint64_t{0} : 0;
      for (size_t k = 0; k < w; ++k) t.bits[k] = (a[k] ^ flip_a) & (b[k] ^ flip_b);
      if (w > 0) t.bits[w - 1] &= mask;
    }
  }
  return tables;
}

namespace {

LabelSet labels_from_tables(std::vector<TruthTable> tables, LabelMode mode) {
  LabelSet set;
  set.mode = mode;
  set.node_probs.reserve(tables.size());
  for (const TruthTable& t : tables)
    set.node_probs.push_back(static_cast<double>(t.ones()) /
                             static_cast<double>(t.pattern_count));
  set.tables = std::move(tables);
  return set;
}

}  // namespace

LabelSet exact_labels(const Aig& aig, int32_t exact_input_cap) {
  if (aig.num_inputs > exact_input_cap)
    raise(ErrorKind::TooManyInputs, "exhaustive labeling over " + std::to_string(aig.num_inputs) +
                                        " inputs exceeds the cap of " +
                                        std::to_string(exact_input_cap));
  PatternSet patterns = PatternSet::exhaustive(aig.num_inputs);
  LabelMode mode{LabelMode::Kind::Exact, 0, patterns.count};
  return labels_from_tables(simulate_patterns(aig, patterns), mode);
}

LabelSet mc_labels(const Aig& aig, uint64_t n_vectors, uint64_t seed) {
  PatternSet patterns = PatternSet::random(aig.num_inputs, n_vectors, seed);
  LabelMode mode{LabelMode::Kind::Sampled, seed, n_vectors};
  return labels_from_tables(simulate_patterns(aig, patterns), mode);
}

double tt_distance(const TruthTable& a, const TruthTable& b) {
  if (a.pattern_count != b.pattern_count || a.bits.size() != b.bits.size())
    raise(ErrorKind::LengthMismatch, "truth tables cover " + std::to_string(a.pattern_count) +
                                         " and " + std::to_string(b.pattern_count) + " patterns");
  uint64_t diff = 0;
  for (size_t k = 0; k < a.bits.size(); ++k)
    diff += static_cast<uint64_t>(std::popcount(a.bits[k] ^ b.bits[k]));
  return static_cast<double>(diff) / static_cast<double>(a.pattern_count);
}

std::vector<PairLabel> sample_pairs(const Aig& aig, const LabelSet& labels, uint64_t k,
                                    uint64_t seed) {
  const uint64_t n = static_cast<uint64_t>(aig.num_nodes());
  if (n < 2) raise(ErrorKind::InvalidParams, "pair sampling needs at least two nodes");
  if (labels.tables.size() != n)
    raise(ErrorKind::LengthMismatch, "label set covers " + std::to_string(labels.tables.size()) +
                                         " nodes, circuit has " + std::to_string(n));

  const uint64_t total = n * (n - 1) / 2;
  const uint64_t want = std::min(k, total);

  // Floyd's sampling of `want` distinct indices from [0, total).
  SplitMix64 rng(seed);
  std::set<uint64_t> chosen;
  for (uint64_t j = total - want; j < total; ++j) {
    uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }

  // Pair (i, j), i < j, has index base(i) + (j - i - 1) with
  // base(i) = i*(n-1) - i*(i-1)/2.
  auto base = [n](uint64_t i) { return i * (n - 1) - i * (i - 1) / 2; };
  std::vector<PairLabel> pairs;
  pairs.reserve(chosen.size());
  for (uint64_t idx : chosen) {
    uint64_t lo = 0, hi = n - 1;
    while (lo + 1 < hi) {
      uint64_t mid = (lo + hi) / 2;
      if (base(mid) <= idx)
        lo = mid;
      else
        hi = mid;
    }
    const uint64_t i = lo;
    const uint64_t j = idx - base(i) + i + 1;
    pairs.push_back(PairLabel{static_cast<int32_t>(i), static_cast<int32_t>(j),
                              tt_distance(labels.tables[i], labels.tables[j])});
  }
  return pairs;
}

std::vector<double> zero_norm(std::span<const double> values) {
  if (values.size() < 2)
    raise(ErrorKind::TooFewValues, "zero_norm needs at least two values, got " +
                                       std::to_string(values.size()));
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double std_dev = std::sqrt(var / n);

  std::vector<double> out(values.begin(), values.end());
  if (std_dev < 1e-12) {
    for (double& v : out) v -= mean;
  } else {
    for (double& v : out) v = (v - mean) / std_dev;
  }
  return out;
}

}  // namespace funcgnn
