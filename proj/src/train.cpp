// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "funcgnn/batch.hpp"
#include "funcgnn/rng.hpp"

namespace funcgnn {

Task task_from_string(const std::string& name) {
  if (name == "spp") return Task::Spp;
  if (name == "ttdp") return Task::Ttdp;
  raise(ErrorKind::BadConfig, "unknown task: " + name);
}

const char* to_string(Task task) { return task == Task::Spp ? "spp" : "ttdp"; }

void TrainConfig::check() const {
  if (!(lr > 0)) raise(ErrorKind::InvalidParams, "lr must be positive");
  if (weight_decay < 0) raise(ErrorKind::InvalidParams, "weight_decay must be non-negative");
  if (batch_size < 1) raise(ErrorKind::InvalidParams, "batch_size must be at least 1");
  if (max_epochs < 1) raise(ErrorKind::InvalidParams, "max_epochs must be at least 1");
  if (patience < 1) raise(ErrorKind::InvalidParams, "patience must be at least 1");
  double sum = split[0] + split[1] + split[2];
  if (split[0] < 0 || split[1] < 0 || split[2] < 0 || std::abs(sum - 1.0) > 1e-9) {
    raise(ErrorKind::BadFractions, "split fractions must be non-negative and sum to one");
  }
}

Tensor spp_loss(const Tensor& pred, std::span<const Real> labels) {
  if (pred.numel() != labels.size()) {
    raise(ErrorKind::LengthMismatch, "prediction and label counts differ");
  }
  return mean_all(abs(sub_const(pred, labels)));
}

Tensor ttdp_loss(const Tensor& embeddings, const std::vector<std::pair<int32_t, int32_t>>& pairs,
                 std::span<const Real> distances) {
  if (pairs.size() < 2) raise(ErrorKind::TooFewPairs, "ttdp loss needs at least two pairs");
  if (pairs.size() != distances.size()) {
    raise(ErrorKind::LengthMismatch, "pair and distance counts differ");
  }
  std::vector<double> target(distances.begin(), distances.end());
  std::vector<double> normed = zero_norm(target);
  std::vector<Real> target_real(normed.begin(), normed.end());
  Tensor d = pair_cosine_distance(embeddings, pairs);
  return mean_all(abs(sub_const(zero_norm_t(d), target_real)));
}

AdamState::AdamState(const ParamStore& params) {
  m.reserve(params.size());
  v.reserve(params.size());
  for (const std::string& name : params.names()) {
    size_t n = params.at(name).numel();
    m.emplace_back(n, Real(0));
    v.emplace_back(n, Real(0));
  }
}

void adam_step(ParamStore& params, AdamState& state, double lr, double weight_decay,
               std::span<const std::string> frozen) {
  if (state.m.size() != params.size()) {
    raise(ErrorKind::LengthMismatch, "optimizer state does not match the parameter store");
  }
  ++state.step_count;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (size_t p = 0; p < params.size(); ++p) {
    const std::string& name = params.names()[p];
    bool is_frozen = false;
    for (const std::string& f : frozen) is_frozen = is_frozen || f == name;
    if (is_frozen) continue;
    Tensor& t = params.at(name);
    std::vector<Real>& value = t.values();
    if (weight_decay != 0.0) {
      const Real keep = static_cast<Real>(1.0 - lr * weight_decay);
      for (Real& x : value) x *= keep;
    }
    if (!t.has_grad()) continue;
    const std::vector<Real>& g = t.grad();
    std::vector<Real>& m = state.m[p];
    std::vector<Real>& v = state.v[p];
    for (size_t i = 0; i < value.size(); ++i) {
      m[i] = static_cast<Real>(state.beta1 * m[i] + (1.0 - state.beta1) * g[i]);
      v[i] = static_cast<Real>(state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i]);
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      value[i] -= static_cast<Real>(lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

SplitIndices split_dataset(size_t count, const std::array<double, 3>& fractions, uint64_t seed) {
  double sum = fractions[0] + fractions[1] + fractions[2];
  if (fractions[0] < 0 || fractions[1] < 0 || fractions[2] < 0 || std::abs(sum - 1.0) > 1e-9) {
    raise(ErrorKind::BadFractions, "split fractions must be non-negative and sum to one");
  }
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), size_t{0});
  SplitMix64 rng(seed);
  shuffle(order, rng);
  size_t n_train = static_cast<size_t>(fractions[0] * static_cast<double>(count));
  size_t n_val = static_cast<size_t>(fractions[1] * static_cast<double>(count));
  if (n_train == 0 || n_val == 0) {
    raise(ErrorKind::EmptySplit, "train and validation splits must be non-empty");
  }
  SplitIndices split;
  split.train.assign(order.begin(), order.begin() + static_cast<ptrdiff_t>(n_train));
  split.val.assign(order.begin() + static_cast<ptrdiff_t>(n_train),
                   order.begin() + static_cast<ptrdiff_t>(n_train + n_val));
  split.test.assign(order.begin() + static_cast<ptrdiff_t>(n_train + n_val), order.end());
  return split;
}

namespace {

GraphBatch make_batch(const std::vector<GraphSample>& data, std::span<const size_t> indices) {
  std::vector<const GraphTensors*> graphs;
  graphs.reserve(indices.size());
  for (size_t idx : indices) graphs.push_back(&data[idx].tensors);
  return GraphBatch::build(graphs);
}

std::vector<Real> batch_labels(const std::vector<GraphSample>& data,
                               std::span<const size_t> indices) {
  std::vector<Real> labels;
  for (size_t idx : indices) {
    labels.insert(labels.end(), data[idx].node_probs.begin(), data[idx].node_probs.end());
  }
  return labels;
}

struct BatchPairs {
  std::vector<std::pair<int32_t, int32_t>> pairs;
  std::vector<Real> distances;
};

BatchPairs batch_pairs(const std::vector<GraphSample>& data, std::span<const size_t> indices,
                       const Segments& segments) {
  BatchPairs out;
  for (size_t g = 0; g < indices.size(); ++g) {
    int32_t base = static_cast<int32_t>(segments.offsets[g]);
    for (const PairLabel& p : data[indices[g]].pairs) {
      out.pairs.emplace_back(base + p.i, base + p.j);
      out.distances.push_back(static_cast<Real>(p.tt_distance));
    }
  }
  return out;
}

}  // namespace

EvalResult evaluate(const FuncGnn& model, const std::vector<GraphSample>& data,
                    std::span<const size_t> indices, Task task, int batch_size) {
  if (batch_size < 1) raise(ErrorKind::InvalidParams, "batch_size must be at least 1");
  EvalResult result;
  double flat_sum = 0.0;  // running sum in batch row order, so that a
                          // single-batch aggregate equals the loss exactly
  for (size_t start = 0; start < indices.size(); start += static_cast<size_t>(batch_size)) {
    size_t stop = std::min(indices.size(), start + static_cast<size_t>(batch_size));
    std::span<const size_t> chunk = indices.subspan(start, stop - start);
    GraphBatch batch = make_batch(data, chunk);
    NoGradGuard no_grad;
    ForwardOutput out = model.forward(batch, false);
    if (task == Task::Spp) {
      const std::vector<Real>& pred = out.spp.values();
      for (size_t g = 0; g < chunk.size(); ++g) {
        const GraphSample& sample = data[chunk[g]];
        int64_t off = batch.segments.offsets[g];
        double circuit_sum = 0.0;
        for (size_t v = 0; v < sample.node_probs.size(); ++v) {
          double diff = std::abs(static_cast<double>(pred[static_cast<size_t>(off) + v]) -
                                 static_cast<double>(sample.node_probs[v]));
          circuit_sum += diff;
          flat_sum += diff;
        }
        EvalRow row;
        row.name = sample.name;
        row.count = sample.node_probs.size();
        row.mae = circuit_sum / static_cast<double>(row.count);
        result.total_count += row.count;
        result.rows.push_back(std::move(row));
      }
    } else {
      const std::vector<Real>& z = out.embeddings.values();
      size_t hidden = out.embeddings.cols();
      for (size_t g = 0; g < chunk.size(); ++g) {
        const GraphSample& sample = data[chunk[g]];
        EvalRow row;
        row.name = sample.name;
        if (sample.pairs.size() < 2) {
          result.rows.push_back(std::move(row));
          continue;
        }
        size_t base = static_cast<size_t>(batch.segments.offsets[g]);
        std::vector<double> pred_d(sample.pairs.size());
        std::vector<double> true_d(sample.pairs.size());
        for (size_t p = 0; p < sample.pairs.size(); ++p) {
          const Real* zi = z.data() + (base + static_cast<size_t>(sample.pairs[p].i)) * hidden;
          const Real* zj = z.data() + (base + static_cast<size_t>(sample.pairs[p].j)) * hidden;
          double dot = 0.0, ni = 0.0, nj = 0.0;
          for (size_t c = 0; c < hidden; ++c) {
            dot += static_cast<double>(zi[c]) * static_cast<double>(zj[c]);
            ni += static_cast<double>(zi[c]) * static_cast<double>(zi[c]);
            nj += static_cast<double>(zj[c]) * static_cast<double>(zj[c]);
          }
          ni = std::sqrt(ni);
          nj = std::sqrt(nj);
          if (ni < 1e-12 || nj < 1e-12) {
            raise(ErrorKind::ZeroEmbedding, "zero embedding in circuit " + sample.name);
          }
          pred_d[p] = 1.0 - dot / (ni * nj);
          true_d[p] = sample.pairs[p].tt_distance;
        }
        std::vector<double> pred_n = zero_norm(pred_d);
        std::vector<double> true_n = zero_norm(true_d);
        double circuit_sum = 0.0;
        for (size_t p = 0; p < pred_n.size(); ++p) {
          double diff = std::abs(pred_n[p] - true_n[p]);
          circuit_sum += diff;
          flat_sum += diff;
        }
        row.count = sample.pairs.size();
        row.mae = circuit_sum / static_cast<double>(row.count);
        result.total_count += row.count;
        result.rows.push_back(std::move(row));
      }
    }
  }
  result.mae = result.total_count == 0 ? 0.0 : flat_sum / static_cast<double>(result.total_count);
  return result;
}

TrainResult train(const std::vector<GraphSample>& data, const ModelConfig& model_config,
                  const TrainConfig& config, Arm arm, std::ostream* log) {
  model_config.check();
  config.check();
  auto t_start = std::chrono::steady_clock::now();

  TrainResult result;
  result.split = split_dataset(data.size(), config.split, config.seed);

  std::vector<Real> train_ratios;
  train_ratios.reserve(result.split.train.size());
  for (size_t idx : result.split.train) {
    train_ratios.push_back(static_cast<Real>(data[idx].tensors.gate_ratio));
  }

  FuncGnn model(model_config, arm);
  model.init_params(derive_seed(config.seed, 1));
  model.ratio_stats() = RatioStats::fit(train_ratios);

  AdamState state(model.params());
  SplitMix64 shuffle_rng(derive_seed(config.seed, 2));
  const uint64_t dropout_base = derive_seed(config.seed, 3);
  uint64_t step = 0;

  ParamStore best_params = model.params().clone();
  std::vector<size_t> order = result.split.train;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto t_epoch = std::chrono::steady_clock::now();
    shuffle(order, shuffle_rng);
    double loss_sum = 0.0;
    size_t loss_count = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
      size_t stop = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      std::span<const size_t> chunk(order.data() + start, stop - start);
      GraphBatch batch = make_batch(data, chunk);
      ForwardOutput out = model.forward(batch, true, derive_seed(dropout_base, step));
      ++step;
      Tensor loss;
      size_t count = 0;
      if (config.task == Task::Spp) {
        std::vector<Real> labels = batch_labels(data, chunk);
        loss = spp_loss(out.spp, labels);
        count = labels.size();
      } else {
        BatchPairs bp = batch_pairs(data, chunk, batch.segments);
        loss = ttdp_loss(out.embeddings, bp.pairs, bp.distances);
        count = bp.pairs.size();
      }
      model.params().zero_grads();
      backward(loss);
      adam_step(model.params(), state, config.lr, config.weight_decay, model.frozen());
      loss_sum += loss.item() * static_cast<double>(count);
      loss_count += count;
    }
    double train_loss = loss_count == 0 ? 0.0 : loss_sum / static_cast<double>(loss_count);
    double val_metric = evaluate(model, data, result.split.val, config.task, config.batch_size).mae;

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_loss;
    record.val_metric = val_metric;
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_epoch).count();
    result.history.push_back(record);
    if (log) {
      (*log) << "epoch " << epoch << " train " << train_loss << " val " << val_metric << " ("
             << record.seconds << "s)\n";
    }

    if (val_metric < result.best_val) {
      result.best_val = val_metric;
      result.best_epoch = epoch;
      best_params = model.params().clone();
    } else if (epoch - result.best_epoch >= config.patience) {
      if (log) (*log) << "early stop at epoch " << epoch << " (best " << result.best_epoch << ")\n";
      break;
    }
  }

  // Ship the best-by-validation weights.
  ParamStore& params = model.params();
  for (const std::string& name : params.names()) {
    params.at(name).values() = best_params.at(name).values();
  }
  result.model = std::move(model);
  result.final_train_metric =
      evaluate(result.model, data, result.split.train, config.task, config.batch_size).mae;
  result.final_val_metric =
      evaluate(result.model, data, result.split.val, config.task, config.batch_size).mae;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace funcgnn
