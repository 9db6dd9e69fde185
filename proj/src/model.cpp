// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/model.hpp"

#include <algorithm>
#include <cmath>

#include "funcgnn/rng.hpp"

namespace funcgnn {

// ---- batch -----------------------------------------------------------------

Tensor GraphBatch::feature_tensor() const {
  return Tensor::from_values({static_cast<size_t>(num_nodes()), static_cast<size_t>(feature_dim)},
                             features);
}

GraphBatch GraphBatch::build(std::span<const GraphTensors* const> graphs) {
  if (graphs.empty()) raise(ErrorKind::InvalidParams, "empty batch");
  GraphBatch batch;
  batch.feature_dim = graphs[0]->feature_dim;
  batch.segments.offsets.push_back(0);

  int64_t offset = 0;
  for (const GraphTensors* g : graphs) {
    if (g->feature_dim != batch.feature_dim)
      raise(ErrorKind::ShapeMismatch, "batch mixes feature widths");
    batch.features.insert(batch.features.end(), g->features.begin(), g->features.end());
    for (size_t e = 0; e < g->edge_src.size(); ++e) {
      batch.edge_src.push_back(static_cast<int32_t>(g->edge_src[e] + offset));
      batch.edge_dst.push_back(static_cast<int32_t>(g->edge_dst[e] + offset));
      batch.edge_sign.push_back(static_cast<Real>(g->edge_sign[e]));
    }
    batch.gate_ratio.push_back(static_cast<Real>(g->gate_ratio));
    offset += g->num_nodes;
    batch.segments.offsets.push_back(offset);
  }
  return batch;
}

GraphBatch GraphBatch::build_one(const GraphTensors& graph) {
  const GraphTensors* ptr = &graph;
  return build(std::span<const GraphTensors* const>(&ptr, 1));
}

// ---- config / arms ----------------------------------------------------------

void ModelConfig::check() const {
  if (L < 1) raise(ErrorKind::InvalidParams, "L must be at least 1");
  if (hidden < 1) raise(ErrorKind::InvalidParams, "hidden must be at least 1");
  if (d_in < 1) raise(ErrorKind::InvalidParams, "d_in must be at least 1");
  if (readout_hidden < 1) raise(ErrorKind::InvalidParams, "readout_hidden must be at least 1");
  if (readout_depth < 0) raise(ErrorKind::InvalidParams, "readout_depth must be non-negative");
  if (dropout < 0.0 || dropout >= 1.0) raise(ErrorKind::InvalidParams, "dropout must lie in [0, 1)");
}

Arm arm_from_string(const std::string& name) {
  if (name == "full") return Arm::Full;
  if (name == "no_hybrid_gcn") return Arm::NoHybridGcn;
  if (name == "no_condnorm") return Arm::NoCondNorm;
  if (name == "no_dense") return Arm::NoDense;
  if (name == "simple_graphnorm") return Arm::SimpleGraphnorm;
  raise(ErrorKind::UnknownArm, "unknown ablation arm '" + name + "'");
}

const char* to_string(Arm arm) {
  switch (arm) {
    case Arm::Full: return "full";
    case Arm::NoHybridGcn: return "no_hybrid_gcn";
    case Arm::NoCondNorm: return "no_condnorm";
    case Arm::NoDense: return "no_dense";
    case Arm::SimpleGraphnorm: return "simple_graphnorm";
  }
  return "full";
}

std::vector<Arm> all_arms() {
  return {Arm::Full, Arm::NoHybridGcn, Arm::NoCondNorm, Arm::NoDense, Arm::SimpleGraphnorm};
}

RatioStats RatioStats::fit(std::span<const Real> ratios) {
  if (ratios.empty()) raise(ErrorKind::InvalidParams, "no ratios to fit");
  RatioStats s;
  Real mean = 0;
  for (Real r : ratios) mean += r;
  mean /= static_cast<Real>(ratios.size());
  Real var = 0;
  for (Real r : ratios) var += (r - mean) * (r - mean);
  s.mean = mean;
  s.stddev = std::sqrt(var / static_cast<Real>(ratios.size()));
  if (s.stddev < Real(1e-12)) s.stddev = Real(1);  // degenerate corpus: identity scale
  return s;
}

Real RatioStats::standardize(Real ratio) const {
  return std::clamp((ratio - mean) / stddev, Real(-5), Real(5));
}

// ---- stages ----------------------------------------------------------------

Tensor cond_graph_norm(const Tensor& h, const Segments& segments, const Tensor& ratio_col,
                       const NormParams& p, Real eps) {
  Tensor standardized = graph_standardize(h, segments, eps);
  Tensor gamma_eff = mul_rowvec(add_const(affine(ratio_col, p.W1, p.b1), Real(1)), p.gamma0);
  Tensor beta_eff = mul_rowvec(add_const(affine(ratio_col, p.W2, p.b2), Real(1)), p.beta0);
  return segment_scale_shift(standardized, gamma_eff, beta_eff, segments);
}

Tensor sage_stage(const Tensor& h, const GraphBatch& batch, const SageParams& p,
                  const NormParams* norm, const Tensor& ratio_col, double dropout_rate,
                  bool training, uint64_t dropout_seed) {
  Tensor transformed = affine(h, p.W, p.b);
  Tensor aggregated =
      signed_scatter_mean(transformed, batch.edge_src, batch.edge_dst, batch.edge_sign);
  Tensor pre = add(aggregated, transformed);
  Tensor normed = norm ? cond_graph_norm(pre, batch.segments, ratio_col, *norm) : pre;
  return dropout(gelu(normed), dropout_rate, training, dropout_seed);
}

Tensor gin_stage(const Tensor& h, const GraphBatch& batch, const GinParams& p) {
  Tensor self = mul_scalar(h, add_const(p.eps, Real(1)));
  Tensor combined = add(self, scatter_sum(h, batch.edge_src, batch.edge_dst));
  return affine(relu(affine(combined, p.W3, p.b3)), p.W4, p.b4);
}

Tensor gcn_stage(const Tensor& h, const GraphBatch& batch, const SageParams& p,
                 const NormParams* norm, const Tensor& ratio_col, double dropout_rate,
                 bool training, uint64_t dropout_seed) {
  const size_t n = static_cast<size_t>(batch.num_nodes());
  std::vector<Real> indeg(n, Real(0));
  for (int32_t v : batch.edge_dst) indeg[static_cast<size_t>(v)] += Real(1);
  std::vector<Real> weight(batch.edge_src.size());
  for (size_t e = 0; e < weight.size(); ++e) {
    const Real ds = std::max(indeg[static_cast<size_t>(batch.edge_src[e])], Real(1));
    const Real dd = std::max(indeg[static_cast<size_t>(batch.edge_dst[e])], Real(1));
    weight[e] = Real(1) / std::sqrt(ds * dd);
  }
  Tensor transformed = affine(h, p.W, p.b);
  Tensor aggregated = scatter_weighted_sum(transformed, batch.edge_src, batch.edge_dst, weight);
  Tensor normed = norm ? cond_graph_norm(aggregated, batch.segments, ratio_col, *norm) : aggregated;
  return dropout(gelu(normed), dropout_rate, training, dropout_seed);
}

// ---- FuncGnn ----------------------------------------------------------------

FuncGnn::FuncGnn(ModelConfig config, Arm arm) : config_(config), arm_(arm) {
  config_.check();
}

namespace {

std::string stage_name(int k, const char* part, const char* field) {
  return "stage" + std::to_string(k) + "." + part + "." + field;
}

}  // namespace

void FuncGnn::init_params(uint64_t seed) {
  params_ = ParamStore();
  frozen_.clear();
  SplitMix64 rng(seed);

  auto weight = [&](const std::string& name, size_t fan_in, size_t fan_out) {
    const Real bound = Real(1) / std::sqrt(static_cast<Real>(fan_in));
    std::vector<Real> v(fan_in * fan_out);
    for (Real& x : v) x = static_cast<Real>(rng.uniform(-bound, bound));
    params_.add(name, Tensor::from_values({fan_in, fan_out}, std::move(v), true));
  };
  auto vec = [&](const std::string& name, size_t len, Real value) {
    params_.add(name, Tensor::full({len}, value, true));
  };

  const size_t h = static_cast<size_t>(config_.hidden);
  const size_t rh = static_cast<size_t>(config_.readout_hidden);

  weight("input.W", static_cast<size_t>(config_.d_in), h);
  vec("input.b", h, 0);

  for (int k = 0; k < config_.L; ++k) {
    const char* conv = arm_ == Arm::NoHybridGcn ? "gcn" : "sage";
    weight(stage_name(k, conv, "W"), h, h);
    vec(stage_name(k, conv, "b"), h, 0);

    if (arm_ != Arm::NoCondNorm) {
      vec(stage_name(k, "norm", "gamma0"), h, 1);
      vec(stage_name(k, "norm", "beta0"), h, 0);
      if (arm_ == Arm::SimpleGraphnorm) {
        for (const char* f : {"W1", "b1", "W2", "b2"}) {
          const std::string name = stage_name(k, "norm", f);
          params_.add(name, Tensor::zeros(f[0] == 'W' ? Shape{1, h} : Shape{h}, true));
          frozen_.push_back(name);
        }
      } else {
        weight(stage_name(k, "norm", "W1"), 1, h);
        vec(stage_name(k, "norm", "b1"), h, 0);
        weight(stage_name(k, "norm", "W2"), 1, h);
        vec(stage_name(k, "norm", "b2"), h, 0);
      }
    }

    weight(stage_name(k, "gin", "W3"), h, h);
    vec(stage_name(k, "gin", "b3"), h, 0);
    weight(stage_name(k, "gin", "W4"), h, h);
    vec(stage_name(k, "gin", "b4"), h, 0);
    vec(stage_name(k, "gin", "eps"), 1, 0);
  }

  const size_t fuse_in = arm_ == Arm::NoDense ? h : h * static_cast<size_t>(config_.L);
  weight("fuse.W", fuse_in, h);
  vec("fuse.b", h, 0);

  size_t in = h;
  for (int l = 0; l < config_.readout_depth; ++l) {
    const std::string p = "readout" + std::to_string(l);
    weight(p + ".W", in, rh);
    vec(p + ".b", rh, 0);
    vec(p + ".ln_gamma", rh, 1);
    vec(p + ".ln_beta", rh, 0);
    in = rh;
  }
  weight("head.W", in, 1);
  vec("head.b", 1, 0);
}

ForwardOutput FuncGnn::forward(const GraphBatch& batch, bool training,
                               uint64_t dropout_seed) const {
  if (batch.feature_dim != config_.d_in)
    raise(ErrorKind::ShapeMismatch, "batch features have width " +
                                        std::to_string(batch.feature_dim) +
                                        ", model expects d_in = " + std::to_string(config_.d_in));
  batch.segments.check(static_cast<size_t>(batch.num_nodes()));

  const size_t graph_count = batch.gate_ratio.size();
  std::vector<Real> r(graph_count);
  for (size_t g = 0; g < r.size(); ++g) r[g] = ratio_stats_.standardize(batch.gate_ratio[g]);
  Tensor ratio_col = Tensor::from_values({graph_count, 1}, std::move(r));

  Tensor h = affine(batch.feature_tensor(), params_.at("input.W"), params_.at("input.b"));

  std::vector<Tensor> stage_outputs;
  stage_outputs.reserve(static_cast<size_t>(config_.L));
  for (int k = 0; k < config_.L; ++k) {
    NormParams norm;
    const NormParams* norm_ptr = nullptr;
    if (arm_ != Arm::NoCondNorm) {
      norm = NormParams{params_.at(stage_name(k, "norm", "gamma0")),
                        params_.at(stage_name(k, "norm", "beta0")),
                        params_.at(stage_name(k, "norm", "W1")),
                        params_.at(stage_name(k, "norm", "b1")),
                        params_.at(stage_name(k, "norm", "W2")),
                        params_.at(stage_name(k, "norm", "b2"))};
      norm_ptr = &norm;
    }
    const uint64_t stage_seed = derive_seed(dropout_seed, static_cast<uint64_t>(k));
    if (arm_ == Arm::NoHybridGcn) {
      SageParams conv{params_.at(stage_name(k, "gcn", "W")), params_.at(stage_name(k, "gcn", "b"))};
      h = gcn_stage(h, batch, conv, norm_ptr, ratio_col, config_.dropout, training, stage_seed);
    } else {
      SageParams conv{params_.at(stage_name(k, "sage", "W")),
                      params_.at(stage_name(k, "sage", "b"))};
      h = sage_stage(h, batch, conv, norm_ptr, ratio_col, config_.dropout, training, stage_seed);
    }
    GinParams gin{params_.at(stage_name(k, "gin", "W3")), params_.at(stage_name(k, "gin", "b3")),
                  params_.at(stage_name(k, "gin", "W4")), params_.at(stage_name(k, "gin", "b4")),
                  params_.at(stage_name(k, "gin", "eps"))};
    h = gin_stage(h, batch, gin);
    stage_outputs.push_back(h);
  }

  Tensor fused_in = arm_ == Arm::NoDense ? stage_outputs.back() : concat_rows(stage_outputs);
  Tensor z = affine(fused_in, params_.at("fuse.W"), params_.at("fuse.b"));

  Tensor u = z;
  for (int l = 0; l < config_.readout_depth; ++l) {
    const std::string p = "readout" + std::to_string(l);
    u = layer_norm(affine(u, params_.at(p + ".W"), params_.at(p + ".b")),
                   params_.at(p + ".ln_gamma"), params_.at(p + ".ln_beta"));
    u = dropout(relu(u), config_.dropout, training,
                derive_seed(dropout_seed, 1000 + static_cast<uint64_t>(l)));
  }
  Tensor spp = sigmoid(affine(u, params_.at("head.W"), params_.at("head.b")));

  return ForwardOutput{z, spp};
}

}  // namespace funcgnn
