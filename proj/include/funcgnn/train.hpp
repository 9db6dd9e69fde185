// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "funcgnn/dataset.hpp"
#include "funcgnn/model.hpp"
#include "funcgnn/tensor.hpp"

namespace funcgnn {

enum class Task { Spp, Ttdp };

Task task_from_string(const std::string& name);
const char* to_string(Task task);

struct TrainConfig {
  double lr = 0.001;
  double weight_decay = 0.0001;
  int batch_size = 128;
  int max_epochs = 500;
  int patience = 100;
  std::array<double, 3> split{0.05, 0.05, 0.9};
  Task task = Task::Spp;
  uint64_t seed = 1;

  void check() const;
};

/// Mean absolute error between predictions and labels.
Tensor spp_loss(const Tensor& pred, std::span<const Real> labels);

/// Truth-table distance loss: cosine distances of the embedding pairs and
/// the target distances are each zero-normalized over the whole pair pool,
/// then compared by mean absolute error. Needs at least two pairs.
Tensor ttdp_loss(const Tensor& embeddings, const std::vector<std::pair<int32_t, int32_t>>& pairs,
                 std::span<const Real> distances);

/// Adam moments, one slot per parameter in store order.
struct AdamState {
  explicit AdamState(const ParamStore& params);

  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step_count = 0;
  std::vector<std::vector<Real>> m;
  std::vector<std::vector<Real>> v;
};

/// One optimizer step: decoupled weight decay (p -= lr * wd * p) applied
/// before the bias-corrected Adam delta. Parameters named in `frozen` and
/// parameters without gradients receive no Adam delta; frozen ones skip the
/// decay as well.
void adam_step(ParamStore& params, AdamState& state, double lr, double weight_decay,
               std::span<const std::string> frozen = {});

struct SplitIndices {
  std::vector<size_t> train, val, test;
};

/// Seeded shuffle followed by contiguous slices: floor(f0 n) train,
/// floor(f1 n) val, remainder test. Fractions must be non-negative and sum
/// to one; empty train or val splits are an error.
SplitIndices split_dataset(size_t count, const std::array<double, 3>& fractions, uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double val_metric = 0;
  double seconds = 0;
};

struct EvalRow {
  std::string name;
  size_t count = 0;
  double mae = 0;
};

struct EvalResult {
  std::vector<EvalRow> rows;
  size_t total_count = 0;
  double mae = 0;
};

/// Deterministic evaluation-mode metric over the indexed samples; per
/// circuit and count-weighted aggregate. SPP scores node probabilities;
/// TTDP zero-normalizes distances per circuit. TTDP rows need at least two
/// pairs; circuits with fewer are reported with count 0 and skipped in the
/// aggregate.
EvalResult evaluate(const FuncGnn& model, const std::vector<GraphSample>& data,
                    std::span<const size_t> indices, Task task, int batch_size = 128);

struct TrainResult {
  FuncGnn model;  // best-by-validation parameters and ratio stats
  SplitIndices split;
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  double best_val = std::numeric_limits<double>::infinity();
  double final_train_metric = 0;
  double final_val_metric = 0;
  double seconds = 0;
};

/// Full training loop: seeded split, ratio standardization fitted on the
/// training split, shuffled minibatches, per-epoch validation, early
/// stopping on the patience budget, best-checkpoint tracking.
TrainResult train(const std::vector<GraphSample>& data, const ModelConfig& model_config,
                  const TrainConfig& config, Arm arm = Arm::Full, std::ostream* log = nullptr);

}  // namespace funcgnn
