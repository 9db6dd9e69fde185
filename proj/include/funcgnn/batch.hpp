// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "funcgnn/aig.hpp"
#include "funcgnn/tensor.hpp"

namespace funcgnn {

/// A minibatch of circuits packed into one disjoint graph: concatenated
/// node rows, edge lists rebased by each graph's node offset, and the raw
/// per-graph gate ratios.
struct GraphBatch {
  Segments segments;
  std::vector<int32_t> edge_src;
  std::vector<int32_t> edge_dst;
  std::vector<Real> edge_sign;
  std::vector<Real> gate_ratio;
  std::vector<Real> features;  // num_nodes x feature_dim, row-major
  int32_t feature_dim = 0;

  int64_t num_nodes() const { return segments.offsets.empty() ? 0 : segments.offsets.back(); }
  int64_t num_graphs() const { return segments.num_graphs(); }

  /// Node features as a constant leaf tensor.
  Tensor feature_tensor() const;

  static GraphBatch build(std::span<const GraphTensors* const> graphs);
  static GraphBatch build_one(const GraphTensors& graph);
};

}  // namespace funcgnn
