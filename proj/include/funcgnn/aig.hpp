// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace funcgnn {

/// A signed reference to a node: sign -1 means the connection is inverted.
struct Fanin {
  int32_t src = 0;
  int8_t sign = 1;
};

enum class NodeKind : uint8_t { Input, And };

/// Combinational and-inverter graph. Nodes are densely indexed: ids
/// [0, num_inputs) are primary inputs, ids [num_inputs, num_nodes()) are
/// two-input And gates. Inversions live on edges as -1 signs, never as
/// separate nodes. `fanins[k]` holds the fanins of And node num_inputs + k;
/// a well-formed gate has exactly two, each referencing a smaller node id.
///
/// The struct is a plain aggregate so that malformed instances can be built
/// and fed to validate(); functions that require well-formedness say so.
struct Aig {
  int32_t num_inputs = 0;
  int32_t num_ands = 0;
  std::vector<std::vector<Fanin>> fanins;
  std::vector<Fanin> outputs;
  std::vector<int32_t> levels;

  int32_t num_nodes() const { return num_inputs + num_ands; }
  NodeKind kind(int32_t v) const { return v < num_inputs ? NodeKind::Input : NodeKind::And; }
  const std::vector<Fanin>& and_fanins(int32_t v) const {
    return fanins[static_cast<size_t>(v - num_inputs)];
  }
};

/// Node features plus signed edge lists, ready for batching. Edges point
/// fanin -> gate. With self-loops enabled every node also carries a +1 edge
/// to itself, appended after the structural edges.
struct GraphTensors {
  int64_t num_nodes = 0;
  int32_t feature_dim = 2;
  std::vector<double> features;  // row-major num_nodes x feature_dim
  std::vector<int32_t> edge_src;
  std::vector<int32_t> edge_dst;
  std::vector<double> edge_sign;
  double gate_ratio = 0.0;
};

inline constexpr double kDefaultRatioCeiling = 32.0;

/// Parses the ASCII AIGER format ("aag" header). Only combinational
/// circuits are accepted: the latch count must be zero. Node ids are
/// variable - 1, so inputs occupy ids [0, I) and gates [I, I + A); the
/// header must satisfy M = I + A. Inversion bits on fanins and outputs
/// become -1 edge signs. The symbol table and comment section are ignored.
/// Binary AIGER payloads ("aig" header) are rejected.
Aig parse_aag(const std::string& text);
Aig parse_aag_file(const std::filesystem::path& path);

/// Inverse of parse_aag, emitting the canonical byte form: no symbol table,
/// no comments, "\n" line ends. parse_aag(serialize_aag(a)) == a for every
/// well-formed Aig.
std::string serialize_aag(const Aig& aig);
void write_aag_file(const std::filesystem::path& path, const Aig& aig);

/// Structural checks. Returns one human-readable violation per defect
/// (fanin arity, sign domain, fanin ordering, output references, level
/// recurrence); empty means well-formed.
std::vector<std::string> validate(const Aig& aig);

/// Levelization: inputs sit at 0, every gate one above its deepest fanin.
/// Throws CycleDetected when a fanin does not precede its gate.
std::vector<int32_t> topo_levels(const Aig& aig);

/// Ratio of positive to negative fanin edge counts over And gates, before
/// any self-loop augmentation; output connections are not counted. Throws
/// NoNotEdges when the circuit has no inverted fanin.
double gate_ratio(const Aig& aig);

/// gate_ratio with the NoNotEdges case mapped to a finite ceiling.
double gate_ratio_or(const Aig& aig, double ceiling = kDefaultRatioCeiling);

/// Lowers a well-formed Aig to tensors: one-hot node-kind features
/// ([1,0] input, [0,1] gate), signed fanin->gate edges and, when requested,
/// +1 self-loops on every node. The gate ratio is computed before the
/// self-loop augmentation and capped at ratio_ceiling.
GraphTensors to_graph_tensors(const Aig& aig, bool add_self_loops,
                              double ratio_ceiling = kDefaultRatioCeiling);

/// Deterministic random circuit. Gate num_inputs + k draws two distinct
/// fanins uniformly from the nodes before it; each fanin is inverted with
/// probability invert_prob. Every node with no fanout becomes an output
/// with sign +1. Draw order per gate: fanin a, fanin b, sign a, sign b.
/// Requires n_inputs >= 1, n_ands >= 0, invert_prob in [0, 1], and
/// n_inputs >= 2 whenever n_ands > 0 (distinct fanins need two candidates).
Aig random_aig(uint64_t seed, int32_t n_inputs, int32_t n_ands, double invert_prob);

}  // namespace funcgnn
