// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "funcgnn/aig.hpp"
#include "funcgnn/rng.hpp"
#include "helpers.hpp"

using namespace funcgnn;
using funcgnn::test::thrown_kind;

namespace {

// One input node with only its self-loop: the smallest stage fixture.
GraphBatch passthrough_batch() {
  Aig aig = parse_aag("aag 1 1 0 1 0\n2\n2\n");
  return GraphBatch::build_one(to_graph_tensors(aig, true));
}

Tensor identity(size_t n) {
  std::vector<Real> v(n * n, 0);
  for (size_t i = 0; i < n; ++i) v[i * n + i] = 1;
  return Tensor::from_values({n, n}, std::move(v), true);
}

// Applies a node permutation to lowered tensors: perm[v] is the new index
// of old node v.
GraphTensors permute(const GraphTensors& g, const std::vector<int64_t>& perm) {
  GraphTensors out = g;
  const size_t c = static_cast<size_t>(g.feature_dim);
  for (int64_t v = 0; v < g.num_nodes; ++v) {
    for (size_t j = 0; j < c; ++j) {
      out.features[static_cast<size_t>(perm[static_cast<size_t>(v)]) * c + j] =
          g.features[static_cast<size_t>(v) * c + j];
    }
  }
  for (size_t e = 0; e < g.edge_src.size(); ++e) {
    out.edge_src[e] = static_cast<int32_t>(perm[static_cast<size_t>(g.edge_src[e])]);
    out.edge_dst[e] = static_cast<int32_t>(perm[static_cast<size_t>(g.edge_dst[e])]);
  }
  return out;
}

// Two-input chain: gate j depends on gate j-1 and the second input, so the
// graph distance from the first gate to the last is the chain length.
Aig chain_aig(int gates) {
  std::string text = "aag " + std::to_string(2 + gates) + " 2 0 1 " + std::to_string(gates) + "\n";
  text += "2\n4\n";
  text += std::to_string(2 * (2 + gates)) + "\n";
  for (int j = 0; j < gates; ++j) {
    const int lhs = 2 * (3 + j);
    const int rhs0 = j == 0 ? 2 : 2 * (2 + j);
    text += std::to_string(lhs) + " " + std::to_string(rhs0) + " 4\n";
  }
  return parse_aag(text);
}

}  // namespace

TEST_CASE("model: default configuration has 927,236 parameters") {
  FuncGnn model(ModelConfig{}, Arm::Full);
  model.init_params(1);
  CHECK(model.params().total_parameters() == 927236);
}

TEST_CASE("model: initialization is deterministic per seed") {
  ModelConfig mc;
  mc.hidden = 8;
  mc.readout_hidden = 8;
  FuncGnn a(mc), b(mc), c(mc);
  a.init_params(5);
  b.init_params(5);
  c.init_params(6);
  CHECK(a.params().at("input.W").values() == b.params().at("input.W").values());
  CHECK(a.params().at("input.W").values() != c.params().at("input.W").values());
}

TEST_CASE("model: config validation rejects out-of-domain fields") {
  ModelConfig mc;
  mc.L = 0;
  CHECK(thrown_kind([&] { mc.check(); }) == ErrorKind::InvalidParams);
  mc = ModelConfig{};
  mc.dropout = 1.0;
  CHECK(thrown_kind([&] { mc.check(); }) == ErrorKind::InvalidParams);
}

TEST_CASE("model: arm names round-trip and unknown names fail") {
  for (Arm arm : all_arms()) CHECK(arm_from_string(to_string(arm)) == arm);
  CHECK(thrown_kind([] { arm_from_string("gcn_only"); }) == ErrorKind::UnknownArm);
}

TEST_CASE("model: gin stage doubles a self-loop-only node under identity params") {
  GraphBatch batch = passthrough_batch();
  Tensor h = Tensor::from_values({1, 2}, {0.5, 1.0}, true);
  GinParams p{identity(2), Tensor::zeros({2}, true), identity(2), Tensor::zeros({2}, true),
              Tensor::zeros({1}, true)};
  Tensor y = gin_stage(h, batch, p);
  CHECK(y.values()[0] == doctest::Approx(1.0));
  CHECK(y.values()[1] == doctest::Approx(2.0));
}

TEST_CASE("model: sage stage reduces to gelu(2h) on the self-loop fixture") {
  GraphBatch batch = passthrough_batch();
  Tensor h = Tensor::from_values({1, 1}, {0.5}, true);
  SageParams p{identity(1), Tensor::zeros({1}, true)};
  Tensor ratio = Tensor::from_values({1, 1}, {0.0});
  Tensor y = sage_stage(h, batch, p, nullptr, ratio, 0.0, false, 0);
  CHECK(y.values()[0] == doctest::Approx(0.8413447460685429).epsilon(1e-12));
}

TEST_CASE("model: conditioned norm with zeroed conditioners is plain graph norm bitwise") {
  SplitMix64 g(31);
  std::vector<Real> hv(5 * 3);
  for (Real& v : hv) v = static_cast<Real>(g.uniform(-2.0, 2.0));
  Tensor h = Tensor::from_values({5, 3}, std::move(hv), true);
  Segments segs{{0, 2, 5}};
  Tensor ratio = Tensor::from_values({2, 1}, {0.7, -1.2});

  std::vector<Real> g0(3), b0(3);
  for (Real& v : g0) v = static_cast<Real>(g.uniform(0.5, 1.5));
  for (Real& v : b0) v = static_cast<Real>(g.uniform(-0.5, 0.5));
  NormParams p{Tensor::from_values({3}, std::vector<Real>(g0)),
               Tensor::from_values({3}, std::vector<Real>(b0)),
               Tensor::zeros({1, 3}), Tensor::zeros({3}),
               Tensor::zeros({1, 3}), Tensor::zeros({3})};
  Tensor got = cond_graph_norm(h, segs, ratio, p);

  std::vector<Real> scale, shift;
  for (int graph = 0; graph < 2; ++graph) {
    scale.insert(scale.end(), g0.begin(), g0.end());
    shift.insert(shift.end(), b0.begin(), b0.end());
  }
  Tensor want = segment_scale_shift(graph_standardize(h, segs),
                                    Tensor::from_values({2, 3}, std::move(scale)),
                                    Tensor::from_values({2, 3}, std::move(shift)), segs);
  CHECK(got.values() == want.values());
}

TEST_CASE("model: spp output is one probability per node") {
  Aig aig = random_aig(3, 4, 12, 0.3);
  GraphBatch batch = GraphBatch::build_one(to_graph_tensors(aig, true));
  ModelConfig mc;
  mc.hidden = 8;
  mc.readout_hidden = 8;
  FuncGnn model(mc);
  model.init_params(2);
  ForwardOutput out = model.forward(batch, false);
  CHECK(out.spp.shape() == Shape{static_cast<size_t>(batch.num_nodes()), 1});
  CHECK(out.embeddings.shape() == Shape{static_cast<size_t>(batch.num_nodes()), 8});
  for (Real p : out.spp.values()) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("model: forward is equivariant under node permutations") {
  SplitMix64 g(17);
  ModelConfig mc;
  mc.hidden = 8;
  mc.readout_hidden = 8;
  for (Arm arm : all_arms()) {
    FuncGnn model(mc, arm);
    model.init_params(11);
    Aig aig = random_aig(g.next_u64(), 5, 20, 0.4);
    GraphTensors base = to_graph_tensors(aig, true);

    std::vector<int64_t> perm(static_cast<size_t>(base.num_nodes));
    std::iota(perm.begin(), perm.end(), int64_t{0});
    shuffle(perm, g);
    GraphTensors permuted = permute(base, perm);

    ForwardOutput a = model.forward(GraphBatch::build_one(base), false);
    ForwardOutput b = model.forward(GraphBatch::build_one(permuted), false);
    for (int64_t v = 0; v < base.num_nodes; ++v) {
      const size_t pv = static_cast<size_t>(perm[static_cast<size_t>(v)]);
      CHECK(std::abs(a.spp.values()[static_cast<size_t>(v)] - b.spp.values()[pv]) <= 1e-9);
      for (size_t j = 0; j < 8; ++j) {
        CHECK(std::abs(a.embeddings.values()[static_cast<size_t>(v) * 8 + j] -
                       b.embeddings.values()[pv * 8 + j]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("model: gate ratio conditions the full arm and not the NoCondNorm arm") {
  Aig aig = random_aig(9, 4, 15, 0.3);
  GraphTensors tensors = to_graph_tensors(aig, true);
  GraphTensors bumped = tensors;
  bumped.gate_ratio = tensors.gate_ratio + 1.0;

  ModelConfig mc;
  mc.hidden = 8;
  mc.readout_hidden = 8;
  for (Arm arm : {Arm::Full, Arm::NoCondNorm}) {
    FuncGnn model(mc, arm);
    model.init_params(4);
    ForwardOutput a = model.forward(GraphBatch::build_one(tensors), false);
    ForwardOutput b = model.forward(GraphBatch::build_one(bumped), false);
    if (arm == Arm::Full) {
      CHECK(a.spp.values() != b.spp.values());
    } else {
      CHECK(a.spp.values() == b.spp.values());
    }
  }
}

TEST_CASE("model: a change outside the receptive field leaves a node untouched") {
  // L=3 blocks, two message-passing hops each: radius 6. The flipped edge
  // sits 9 hops upstream of the probe, so the probe row must not move.
  GraphTensors base = to_graph_tensors(chain_aig(10), true);
  GraphTensors flipped = base;
  bool found = false;
  for (size_t e = 0; e < base.edge_src.size(); ++e) {
    if (base.edge_src[e] == 0 && base.edge_dst[e] == 2) {
      flipped.edge_sign[e] = -flipped.edge_sign[e];
      found = true;
      break;
    }
  }
  REQUIRE(found);

  ModelConfig mc;
  mc.hidden = 8;
  mc.readout_hidden = 8;
  FuncGnn model(mc, Arm::NoCondNorm);  // no graph-wide pooling in this arm
  model.init_params(13);
  ForwardOutput a = model.forward(GraphBatch::build_one(base), false);
  ForwardOutput b = model.forward(GraphBatch::build_one(flipped), false);

  const size_t probe = static_cast<size_t>(base.num_nodes) - 1;
  CHECK(a.spp.values()[probe] == b.spp.values()[probe]);
  CHECK(a.spp.values()[2] != b.spp.values()[2]);  // the gate right at the flip moves
}

TEST_CASE("model: ratio stats standardize and clamp") {
  std::vector<Real> ratios{1.0, 2.0, 3.0, 4.0};
  RatioStats stats = RatioStats::fit(ratios);
  CHECK(stats.mean == doctest::Approx(2.5));
  CHECK(stats.standardize(2.5) == doctest::Approx(0.0));
  CHECK(stats.standardize(1e9) == doctest::Approx(5.0));
  CHECK(stats.standardize(-1e9) == doctest::Approx(-5.0));
}

TEST_CASE("model: simple_graphnorm arm freezes zeroed conditioners") {
  ModelConfig mc;
  mc.hidden = 4;
  mc.readout_hidden = 4;
  FuncGnn model(mc, Arm::SimpleGraphnorm);
  model.init_params(1);
  CHECK(model.frozen().size() == 12);  // 4 conditioners x 3 stages
  for (const std::string& name : model.frozen()) {
    for (Real v : model.params().at(name).values()) CHECK(v == 0.0);
  }
}

TEST_CASE("model: batches reject feature widths the model was not built for") {
  ModelConfig mc;
  mc.hidden = 4;
  mc.readout_hidden = 4;
  mc.d_in = 3;
  FuncGnn model(mc);
  model.init_params(1);
  GraphBatch batch = passthrough_batch();  // feature_dim 2
  CHECK(thrown_kind([&] { model.forward(batch, false); }) == ErrorKind::ShapeMismatch);
}
