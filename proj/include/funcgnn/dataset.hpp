// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "funcgnn/aig.hpp"
#include "funcgnn/sim.hpp"
#include "funcgnn/tensor.hpp"

namespace funcgnn {

/// One labeled circuit, ready for batching: self-loop-augmented tensors,
/// per-node signal probabilities and sampled truth-table distance pairs.
struct GraphSample {
  std::string name;
  GraphTensors tensors;
  std::vector<Real> node_probs;
  std::vector<PairLabel> pairs;
};

struct CorpusParams {
  int count = 500;
  int min_inputs = 4;
  int max_inputs = 12;
  int min_ands = 20;
  int max_ands = 300;
  double invert_min = 0.1;
  double invert_max = 0.5;
};

struct LabelPolicy {
  enum class Mode { Auto, Exact, Sampled };
  Mode mode = Mode::Auto;
  uint64_t sample_count = 16384;  // patterns when sampling
  int32_t exact_input_cap = 16;
  uint64_t pair_factor = 4;  // pair budget = factor * num_nodes
  int32_t max_nodes = 20000;
};

/// Deterministic parameters for corpus slot `index`: input count, gate
/// count and inversion probability drawn from a per-index sub-stream of
/// `seed`.
Aig corpus_circuit(const CorpusParams& params, uint64_t seed, int index);

struct DatasetEntry {
  std::string name;
  Aig aig;
  LabelMode mode;
  GraphSample sample;
};

/// Labels one circuit: exhaustive labels when the input count is within the
/// cap (or always, for Mode::Exact), seeded sampled labels otherwise. Pairs
/// are drawn with a sub-seed of label_seed. Throws InvalidParams when the
/// circuit exceeds policy.max_nodes.
DatasetEntry build_entry(std::string name, Aig aig, const LabelPolicy& policy,
                         uint64_t label_seed);

/// On-disk layout under `dir`:
///   circuits/<name>.aag   canonical ASCII circuit
///   labels/<name>.csv     node_id,prob
///   pairs/<name>.csv      i,j,tt_dist
///   manifest.json         entry list plus the generation settings
/// The payload is a pure function of its inputs; no timestamps live here.
void write_dataset(const std::filesystem::path& dir, const std::vector<DatasetEntry>& entries,
                   const std::string& settings_json, const std::string& run_hash);

std::vector<GraphSample> load_dataset(const std::filesystem::path& dir);

}  // namespace funcgnn
