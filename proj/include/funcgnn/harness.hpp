// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "funcgnn/config.hpp"
#include "funcgnn/dataset.hpp"
#include "funcgnn/gradcheck.hpp"
#include "funcgnn/train.hpp"

namespace funcgnn {

/// Provenance record written next to every command's outputs. The content
/// hash covers the command's inputs (config, seeds, input payload), so a
/// rerun with identical inputs carries an identical hash. Timestamps live
/// only here; CSV outputs stay byte-reproducible and reference the manifest
/// through the hash.
struct RunManifest {
  std::string command;
  std::string config_text;
  std::vector<uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string content_hash;
  std::string timestamp;
};

void write_run_manifest(const std::filesystem::path& path, const RunManifest& manifest);

/// Payload fingerprint of a dataset directory: SHA-256 over every entry's
/// name and its circuit/label/pair bytes in manifest order. The manifest
/// file itself is excluded so the fingerprint can be embedded into it.
std::string dataset_fingerprint(const std::filesystem::path& dir);

// ---- dataset ---------------------------------------------------------------

struct DatasetOptions {
  std::filesystem::path out_dir;
  std::filesystem::path input_dir;  // set: ingest .aag files; empty: generate
  CorpusParams corpus;
  LabelPolicy policy;
  uint64_t seed = 1;
};

struct DatasetReport {
  size_t written = 0;
  std::vector<std::string> skipped;  // "name: reason" per rejected input
  std::string fingerprint;
};

/// Builds a labeled dataset directory. Ingest mode parses every *.aag file
/// in sorted order, collecting per-file failures instead of aborting;
/// generate mode draws the seeded corpus. Writes the payload, its manifest
/// and a run manifest; skipped files land in skipped.txt.
DatasetReport cmd_dataset(const DatasetOptions& options, std::ostream& log);

// ---- train / eval ----------------------------------------------------------

struct TrainOptions {
  std::filesystem::path dataset_dir;
  std::filesystem::path out_dir;
  RunConfig config;
  Arm arm = Arm::Full;
};

struct TrainReport {
  TrainResult result;
  std::filesystem::path checkpoint_path;
  std::filesystem::path log_path;
};

/// Trains one model, writing model.ckpt (with the train config, dataset
/// fingerprint and final metrics in the meta block), train_log.csv
/// (epoch,train_loss,val_metric,seconds) and a run manifest.
TrainReport cmd_train(const TrainOptions& options, std::ostream& log);

enum class EvalSplit { All, Train, Val, Test };

EvalSplit eval_split_from_string(const std::string& name);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path dataset_dir;
  std::filesystem::path out_dir;
  Task task = Task::Spp;
  EvalSplit split = EvalSplit::All;
  int batch_size = 128;
};

/// Scores a checkpoint, writing eval.csv (name,count,mae rows plus an
/// aggregate "all" row). Split selection other than All replays the
/// checkpoint's recorded split and requires the dataset fingerprint to
/// match the one the model was trained on (ConfigMismatch otherwise).
EvalResult cmd_eval(const EvalOptions& options, std::ostream& log);

// ---- verification and study commands ---------------------------------------

/// Runs the finite-difference suite, one report line per op. The caller
/// maps a failed suite to the numerical-check exit code.
std::vector<GradCheckResult> cmd_gradcheck(uint64_t seed, std::ostream& log);

struct AblateRow {
  std::string arm;
  double spp_mae = 0;
  double ttdp_mae = 0;
  double seconds = 0;
};

/// Trains every requested arm on both tasks under the identical config and
/// seed; writes ablation.csv. Unknown arm names fail before any training.
std::vector<AblateRow> cmd_ablate(const std::filesystem::path& dataset_dir,
                                  const std::vector<std::string>& arms, const RunConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log);

struct SweepRow {
  int L = 0;
  double train_frac = 0;
  double spp_mae = 0;
  double ttdp_mae = 0;
  double seconds = 0;
};

/// Grid over layer counts and split fractions f (train = val = f); one row
/// per cell covering both tasks; writes sweep.csv.
std::vector<SweepRow> cmd_sweep_layers(const std::filesystem::path& dataset_dir,
                                       const std::vector<int>& layer_counts,
                                       const std::vector<double>& train_fracs,
                                       const RunConfig& config,
                                       const std::filesystem::path& out_dir, std::ostream& log);

/// Box-plot statistics with linear-interpolation quartiles; whiskers sit at
/// the outermost data points within 1.5 IQR of the quartiles.
struct QuartileStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double iqr = 0;
  double whisker_low = 0, whisker_high = 0;
  double span = 0;  // whisker_high - whisker_low
};

QuartileStats quartile_stats(std::vector<double> values);

struct StabilityRow {
  uint64_t seed = 0;
  double mae = 0;
  double seconds = 0;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  QuartileStats stats;
};

/// Trains the SPP task once per seed with early stopping disabled, writes
/// stability.csv (per seed) and stability_summary.csv (quartile stats).
/// Needs at least two seeds.
StabilityReport cmd_stability(const std::filesystem::path& dataset_dir,
                              const std::vector<uint64_t>& seeds, const RunConfig& config,
                              const std::filesystem::path& out_dir, std::ostream& log);

std::vector<uint64_t> default_stability_seeds();  // 42, 84, ..., 420

// ---- baselines -------------------------------------------------------------

/// MAE of predicting `value` for every node of the indexed samples.
double constant_predictor_mae(const std::vector<GraphSample>& data,
                              std::span<const size_t> indices, double value);

/// TTDP MAE of seeded uniform random embeddings, evaluated exactly like a
/// model (per-circuit zero-normed cosine distances, count-weighted).
double random_embedding_ttdp_mae(const std::vector<GraphSample>& data,
                                 std::span<const size_t> indices, int hidden, uint64_t seed);

}  // namespace funcgnn
