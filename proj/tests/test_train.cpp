// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/train.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "funcgnn/dataset.hpp"
#include "funcgnn/rng.hpp"
#include "helpers.hpp"

using namespace funcgnn;
using funcgnn::test::thrown_kind;

namespace {

std::vector<GraphSample> tiny_corpus(int n, uint64_t seed) {
  CorpusParams cp;
  cp.count = n;
  cp.min_inputs = 3;
  cp.max_inputs = 6;
  cp.min_ands = 8;
  cp.max_ands = 30;
  LabelPolicy lp;
  std::vector<GraphSample> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    DatasetEntry e = build_entry("c" + std::to_string(i), corpus_circuit(cp, seed, i), lp,
                                 derive_seed(seed, static_cast<uint64_t>(i)));
    out.push_back(std::move(e.sample));
  }
  return out;
}

TrainConfig lean_config() {
  TrainConfig tc;
  tc.lr = 0.01;
  tc.batch_size = 8;
  tc.max_epochs = 3;
  tc.patience = 3;
  tc.split = {0.6, 0.2, 0.2};
  tc.seed = 5;
  return tc;
}

ModelConfig lean_model() {
  ModelConfig mc;
  mc.hidden = 8;
  mc.readout_hidden = 8;
  return mc;
}

}  // namespace

TEST_CASE("train: first adam step matches the hand-computed update") {
  ParamStore params;
  params.add("p", Tensor::from_values({1}, {1.0}, true));
  params.at("p").zero_grad();
  params.at("p").node()->grad[0] = 0.5;

  AdamState state(params);
  adam_step(params, state, 0.001, 0.0);
  // mhat = 0.5, vhat = 0.25, delta = lr * mhat / (sqrt(vhat) + 1e-8)
  CHECK(params.at("p").values()[0] == doctest::Approx(0.99900000002).epsilon(1e-12));
  CHECK(state.step_count == 1);
}

TEST_CASE("train: gradient-free parameters decay and do nothing else") {
  ParamStore params;
  params.add("p", Tensor::from_values({1}, {2.0}, true));
  AdamState state(params);
  adam_step(params, state, 0.1, 0.01);
  CHECK(params.at("p").values()[0] == 2.0 * (1.0 - 0.1 * 0.01));
}

TEST_CASE("train: frozen parameters skip both decay and delta") {
  ParamStore params;
  params.add("p", Tensor::from_values({1}, {2.0}, true));
  params.at("p").zero_grad();
  params.at("p").node()->grad[0] = 1.0;
  AdamState state(params);
  std::vector<std::string> frozen{"p"};
  adam_step(params, state, 0.1, 0.01, frozen);
  CHECK(params.at("p").values()[0] == 2.0);
}

TEST_CASE("train: adam rejects a state built for a different store") {
  ParamStore a, b;
  a.add("p", Tensor::from_values({1}, {1.0}, true));
  b.add("p", Tensor::from_values({1}, {1.0}, true));
  b.add("q", Tensor::from_values({1}, {1.0}, true));
  AdamState state(a);
  CHECK(thrown_kind([&] { adam_step(b, state, 0.1, 0.0); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("train: split sizes follow the fractions and cover everything once") {
  SplitIndices s = split_dataset(100, {0.05, 0.05, 0.9}, 7);
  CHECK(s.train.size() == 5);
  CHECK(s.val.size() == 5);
  CHECK(s.test.size() == 90);

  std::set<size_t> all;
  for (size_t i : s.train) all.insert(i);
  for (size_t i : s.val) all.insert(i);
  for (size_t i : s.test) all.insert(i);
  CHECK(all.size() == 100);
  CHECK(*all.rbegin() == 99);
}

TEST_CASE("train: split is deterministic per seed and differs across seeds") {
  SplitIndices a = split_dataset(50, {0.2, 0.2, 0.6}, 3);
  SplitIndices b = split_dataset(50, {0.2, 0.2, 0.6}, 3);
  SplitIndices c = split_dataset(50, {0.2, 0.2, 0.6}, 4);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.train != c.train);
}

TEST_CASE("train: split rejects bad fractions and empty slices") {
  CHECK(thrown_kind([] { split_dataset(100, {0.5, 0.5, 0.5}, 1); }) == ErrorKind::BadFractions);
  CHECK(thrown_kind([] { split_dataset(100, {-0.1, 0.2, 0.9}, 1); }) == ErrorKind::BadFractions);
  CHECK(thrown_kind([] { split_dataset(5, {0.05, 0.05, 0.9}, 1); }) == ErrorKind::EmptySplit);
}

TEST_CASE("train: spp_loss is the mean absolute error") {
  Tensor pred = Tensor::from_values({3, 1}, {0.5, 0.25, 1.0}, true);
  std::vector<Real> labels{0.5, 0.75, 0.0};
  CHECK(spp_loss(pred, labels).item() == doctest::Approx((0.0 + 0.5 + 1.0) / 3));
  std::vector<Real> wrong{0.5};
  CHECK(thrown_kind([&] { spp_loss(pred, wrong); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("train: ttdp_loss on anti-aligned pairs is exactly 2") {
  // Pair distances (1, 0) zero-norm to (1, -1); targets (0, 1) to (-1, 1).
  Tensor z = Tensor::from_values({4, 2}, {1, 0, 0, 1, 1, 0, 1, 0}, true);
  std::vector<std::pair<int32_t, int32_t>> pairs{{0, 1}, {2, 3}};
  std::vector<Real> dist{0.0, 1.0};
  CHECK(ttdp_loss(z, pairs, dist).item() == 2.0);
}

TEST_CASE("train: ttdp_loss ignores positive affine rescaling of the targets") {
  SplitMix64 g(21);
  std::vector<Real> zv(6 * 4);
  for (Real& v : zv) {
    const double u = g.uniform(-1.0, 1.0);
    v = static_cast<Real>(u < 0 ? u - 0.3 : u + 0.3);
  }
  Tensor z = Tensor::from_values({6, 4}, std::move(zv), true);
  std::vector<std::pair<int32_t, int32_t>> pairs{{0, 1}, {2, 3}, {4, 5}, {0, 3}};
  std::vector<Real> dist{0.1, 0.9, 0.4, 0.6};
  std::vector<Real> scaled(dist.size());
  for (size_t i = 0; i < dist.size(); ++i) scaled[i] = static_cast<Real>(3.7 * dist[i] + 0.21);
  const double a = ttdp_loss(z, pairs, dist).item();
  const double b = ttdp_loss(z, pairs, scaled).item();
  CHECK(std::abs(a - b) <= 1e-9);
}

TEST_CASE("train: ttdp_loss needs at least two pairs") {
  Tensor z = Tensor::from_values({2, 2}, {1, 0, 0, 1}, true);
  std::vector<std::pair<int32_t, int32_t>> pairs{{0, 1}};
  std::vector<Real> dist{0.5};
  CHECK(thrown_kind([&] { ttdp_loss(z, pairs, dist); }) == ErrorKind::TooFewPairs);
}

TEST_CASE("train: config check rejects out-of-domain settings") {
  TrainConfig tc;
  tc.lr = 0.0;
  CHECK(thrown_kind([&] { tc.check(); }) == ErrorKind::InvalidParams);
  tc = TrainConfig{};
  tc.split = {0.3, 0.3, 0.3};
  CHECK(thrown_kind([&] { tc.check(); }) == ErrorKind::BadFractions);
}

TEST_CASE("train: evaluate agrees with the loss on a single-batch split") {
  std::vector<GraphSample> data = tiny_corpus(4, 77);
  FuncGnn model(lean_model());
  model.init_params(3);
  std::vector<size_t> indices{0, 1, 2, 3};

  EvalResult spp = evaluate(model, data, indices, Task::Spp, 128);
  CHECK(spp.rows.size() == 4);

  std::vector<const GraphTensors*> ptrs;
  for (const GraphSample& s : data) ptrs.push_back(&s.tensors);
  GraphBatch batch = GraphBatch::build(ptrs);
  std::vector<Real> labels;
  for (const GraphSample& s : data)
    labels.insert(labels.end(), s.node_probs.begin(), s.node_probs.end());
  ForwardOutput out = model.forward(batch, false);
  CHECK(spp.mae == spp_loss(out.spp, labels).item());
}

TEST_CASE("train: three epochs run, log, and improve the training loss") {
  std::vector<GraphSample> data = tiny_corpus(20, 41);
  TrainResult r = train(data, lean_model(), lean_config());
  REQUIRE(r.history.size() == 3);
  CHECK(r.history.back().train_loss < r.history.front().train_loss);
  CHECK(r.best_epoch >= 1);
  CHECK(std::isfinite(r.best_val));
  CHECK(r.split.train.size() == 12);
}

TEST_CASE("train: identical seeds reproduce the run bitwise") {
  std::vector<GraphSample> data = tiny_corpus(12, 19);
  TrainResult a = train(data, lean_model(), lean_config());
  TrainResult b = train(data, lean_model(), lean_config());
  REQUIRE(a.history.size() == b.history.size());
  for (size_t e = 0; e < a.history.size(); ++e) {
    CHECK(a.history[e].train_loss == b.history[e].train_loss);
    CHECK(a.history[e].val_metric == b.history[e].val_metric);
  }
  CHECK(a.model.params().at("input.W").values() == b.model.params().at("input.W").values());
}

TEST_CASE("train: the returned model carries the best-validation parameters") {
  std::vector<GraphSample> data = tiny_corpus(12, 23);
  TrainConfig tc = lean_config();
  tc.max_epochs = 4;
  tc.patience = 4;
  TrainResult r = train(data, lean_model(), tc);
  double best = r.best_val;
  for (const EpochRecord& rec : r.history) CHECK(rec.val_metric >= best);
  EvalResult replay = evaluate(r.model, data, r.split.val, tc.task, tc.batch_size);
  CHECK(replay.mae == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("train: a divergent learning rate trips early stopping") {
  std::vector<GraphSample> data = tiny_corpus(10, 29);
  TrainConfig tc = lean_config();
  tc.lr = 30.0;
  tc.max_epochs = 40;
  tc.patience = 2;
  TrainResult r = train(data, lean_model(), tc);
  CHECK(r.history.size() < 40);
  CHECK(r.best_epoch <= static_cast<int>(r.history.size()));
}

TEST_CASE("train: ttdp task trains end to end") {
  std::vector<GraphSample> data = tiny_corpus(12, 31);
  TrainConfig tc = lean_config();
  tc.task = Task::Ttdp;
  TrainResult r = train(data, lean_model(), tc);
  CHECK(r.history.size() == 3);
  CHECK(std::isfinite(r.best_val));
}

TEST_CASE("train: task names round-trip") {
  CHECK(task_from_string("spp") == Task::Spp);
  CHECK(task_from_string("ttdp") == Task::Ttdp);
  CHECK(std::string(to_string(Task::Spp)) == "spp");
  CHECK(thrown_kind([] { task_from_string("both"); }) == ErrorKind::BadConfig);
}
