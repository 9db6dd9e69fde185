// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "funcgnn/batch.hpp"
#include "funcgnn/tensor.hpp"

namespace funcgnn {

struct ModelConfig {
  int L = 3;
  int hidden = 256;
  double dropout = 0.1;
  int d_in = 2;
  int readout_hidden = 256;
  int readout_depth = 2;

  void check() const;
};

/// Ablation arms. Full is the shipping model; the others disable one
/// component each and exist for controlled comparisons.
enum class Arm {
  Full,            // signed-mean + GIN stages, conditioned norm, dense fusion
  NoHybridGcn,     // unsigned normalized convolution instead of the signed mean
  NoCondNorm,      // no graph normalization inside the stages
  NoDense,         // fusion sees only the last stage output
  SimpleGraphnorm, // conditioners zeroed and frozen: plain graph normalization
};

Arm arm_from_string(const std::string& name);
const char* to_string(Arm arm);
std::vector<Arm> all_arms();

/// Standardization constants for the gate ratio, fitted on the training
/// split and stored with the checkpoint. Standardized values are clamped
/// to [-5, 5].
struct RatioStats {
  Real mean = 0;
  Real stddev = 1;

  static RatioStats fit(std::span<const Real> ratios);
  Real standardize(Real ratio) const;
};

struct SageParams {
  Tensor W, b;
};

struct NormParams {
  Tensor gamma0, beta0, W1, b1, W2, b2;
};

struct GinParams {
  Tensor W3, b3, W4, b4, eps;
};

/// Graph normalization whose affine map is conditioned on the standardized
/// gate ratio r of each graph: the columns are standardized per graph, then
/// scaled by gamma0 * (1 + W1 r + b1) and shifted by beta0 * (1 + W2 r + b2).
/// With W1, b1, W2, b2 all zero this is exactly plain graph normalization.
Tensor cond_graph_norm(const Tensor& h, const Segments& segments, const Tensor& ratio_col,
                       const NormParams& p, Real eps = Real(1e-5));

/// Signed-mean aggregation stage: transform, mean of sign-weighted
/// transformed neighbors (self-loops ride along as +1 edges), skip add of
/// the node's own transformed feature, optional conditioned normalization,
/// gelu, dropout.
Tensor sage_stage(const Tensor& h, const GraphBatch& batch, const SageParams& p,
                  const NormParams* norm, const Tensor& ratio_col, double dropout_rate,
                  bool training, uint64_t dropout_seed);

/// Sum aggregation stage: MLP((1 + eps) h_v + sum of incoming h_u), edge
/// signs ignored. The MLP is W4 relu(W3 x + b3) + b4.
Tensor gin_stage(const Tensor& h, const GraphBatch& batch, const GinParams& p);

/// Unsigned convolution used by the NoHybridGcn arm: transformed features
/// aggregated with 1/sqrt(indeg(u) indeg(v)) weights over the same edge
/// list, then the stage's usual norm, gelu and dropout (no skip term).
Tensor gcn_stage(const Tensor& h, const GraphBatch& batch, const SageParams& p,
                 const NormParams* norm, const Tensor& ratio_col, double dropout_rate,
                 bool training, uint64_t dropout_seed);

struct ForwardOutput {
  Tensor embeddings;  // num_nodes x hidden, the fused representation
  Tensor spp;         // num_nodes x 1, sigmoid probabilities
};

/// The full network: input projection, L pairs of (signed-mean, sum)
/// stages, fusion over the concatenated stage outputs, and a normalized
/// MLP readout head for signal probabilities.
class FuncGnn {
 public:
  FuncGnn() = default;
  FuncGnn(ModelConfig config, Arm arm = Arm::Full);

  /// Deterministic initialization: weights uniform in +-1/sqrt(fan_in)
  /// drawn row-major in parameter order, biases and beta0 zero, gamma0 and
  /// layer-norm gains one, gin eps zero. SimpleGraphnorm zeroes and freezes
  /// the norm conditioners.
  void init_params(uint64_t seed);

  ForwardOutput forward(const GraphBatch& batch, bool training, uint64_t dropout_seed = 0) const;

  const ModelConfig& config() const { return config_; }
  Arm arm() const { return arm_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const std::vector<std::string>& frozen() const { return frozen_; }
  RatioStats& ratio_stats() { return ratio_stats_; }
  const RatioStats& ratio_stats() const { return ratio_stats_; }

 private:
  ModelConfig config_;
  Arm arm_ = Arm::Full;
  ParamStore params_;
  std::vector<std::string> frozen_;
  RatioStats ratio_stats_;
};

}  // namespace funcgnn
