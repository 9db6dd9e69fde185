// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "funcgnn/checkpoint.hpp"
#include "funcgnn/io.hpp"
#include "funcgnn/rng.hpp"

namespace funcgnn {

namespace {

namespace fs = std::filesystem;

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

nlohmann::json train_config_json(const TrainConfig& t) {
  nlohmann::json j;
  j["lr"] = t.lr;
  j["weight_decay"] = t.weight_decay;
  j["batch_size"] = t.batch_size;
  j["max_epochs"] = t.max_epochs;
  j["patience"] = t.patience;
  j["split"] = {t.split[0], t.split[1], t.split[2]};
  j["task"] = to_string(t.task);
  j["seed"] = t.seed;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig t;
  t.lr = j.at("lr").get<double>();
  t.weight_decay = j.at("weight_decay").get<double>();
  t.batch_size = j.at("batch_size").get<int>();
  t.max_epochs = j.at("max_epochs").get<int>();
  t.patience = j.at("patience").get<int>();
  t.split = {j.at("split")[0].get<double>(), j.at("split")[1].get<double>(),
             j.at("split")[2].get<double>()};
  t.task = task_from_string(j.at("task").get<std::string>());
  t.seed = j.at("seed").get<uint64_t>();
  return t;
}

nlohmann::json policy_json(const LabelPolicy& p) {
  nlohmann::json j;
  switch (p.mode) {
    case LabelPolicy::Mode::Auto: j["mode"] = "auto"; break;
    case LabelPolicy::Mode::Exact: j["mode"] = "exact"; break;
    case LabelPolicy::Mode::Sampled: j["mode"] = "sampled"; break;
  }
  j["sample_count"] = p.sample_count;
  j["exact_input_cap"] = p.exact_input_cap;
  j["pair_factor"] = p.pair_factor;
  j["max_nodes"] = p.max_nodes;
  return j;
}

std::vector<size_t> all_indices(size_t n) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  return idx;
}

}  // namespace

void write_run_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config"] = manifest.config_text;
  j["seeds"] = manifest.seeds;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["content_hash"] = manifest.content_hash;
  j["timestamp"] = manifest.timestamp.empty() ? utc_timestamp() : manifest.timestamp;
  write_text_file(path, j.dump(2) + "\n");
}

std::string dataset_fingerprint(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    raise(ErrorKind::IoError, "manifest.json is not JSON: " + dir.string());
  }
  std::string blob;
  for (const nlohmann::json& row : manifest.at("entries")) {
    std::string name = row.at("name").get<std::string>();
    blob += name;
    blob += '\n';
    blob += read_text_file(dir / "circuits" / (name + ".aag"));
    blob += read_text_file(dir / "labels" / (name + ".csv"));
    blob += read_text_file(dir / "pairs" / (name + ".csv"));
  }
  return sha256_hex(blob);
}

DatasetReport cmd_dataset(const DatasetOptions& options, std::ostream& log) {
  DatasetReport report;
  std::vector<DatasetEntry> entries;
  nlohmann::json settings;
  settings["seed"] = options.seed;
  settings["policy"] = policy_json(options.policy);
  const uint64_t label_base = derive_seed(options.seed, 0xFEEDULL);

  if (!options.input_dir.empty()) {
    settings["mode"] = "ingest";
    settings["source"] = options.input_dir.string();
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(options.input_dir, ec)) {
      if (e.path().extension() == ".aag") files.push_back(e.path());
    }
    if (ec) raise(ErrorKind::IoError, "cannot list " + options.input_dir.string());
    std::sort(files.begin(), files.end());
    if (files.empty()) raise(ErrorKind::IoError, "no .aag files in " + options.input_dir.string());
    for (size_t i = 0; i < files.size(); ++i) {
      std::string name = files[i].stem().string();
      try {
        Aig aig = parse_aag_file(files[i]);
        std::vector<std::string> violations = validate(aig);
        if (!violations.empty()) raise(ErrorKind::InvalidParams, violations.front());
        entries.push_back(build_entry(name, std::move(aig), options.policy, derive_seed(label_base, i)));
      } catch (const Error& err) {
        report.skipped.push_back(name + ": " + err.what());
        log << "skip " << name << ": " << err.what() << "\n";
      }
    }
  } else {
    settings["mode"] = "generate";
    settings["corpus"]["count"] = options.corpus.count;
    settings["corpus"]["min_inputs"] = options.corpus.min_inputs;
    settings["corpus"]["max_inputs"] = options.corpus.max_inputs;
    settings["corpus"]["min_ands"] = options.corpus.min_ands;
    settings["corpus"]["max_ands"] = options.corpus.max_ands;
    settings["corpus"]["invert_min"] = options.corpus.invert_min;
    settings["corpus"]["invert_max"] = options.corpus.invert_max;
    for (int i = 0; i < options.corpus.count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "gen%04d", i);
      try {
        entries.push_back(build_entry(name, corpus_circuit(options.corpus, options.seed, i),
                                      options.policy, derive_seed(label_base, static_cast<uint64_t>(i))));
      } catch (const Error& err) {
        report.skipped.push_back(std::string(name) + ": " + err.what());
        log << "skip " << name << ": " << err.what() << "\n";
      }
    }
  }
  if (entries.empty()) raise(ErrorKind::IoError, "no circuits survived labeling");

  write_dataset(options.out_dir, entries, settings.dump(), "");
  report.fingerprint = dataset_fingerprint(options.out_dir);
  nlohmann::json manifest = nlohmann::json::parse(read_text_file(options.out_dir / "manifest.json"));
  manifest["run"] = report.fingerprint;
  write_text_file(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
  report.written = entries.size();

  if (!report.skipped.empty()) {
    std::string text;
    for (const std::string& line : report.skipped) text += line + "\n";
    write_text_file(options.out_dir / "skipped.txt", text);
  }

  RunManifest rm;
  rm.command = "dataset";
  rm.config_text = settings.dump(2);
  rm.seeds = {options.seed};
  if (!options.input_dir.empty()) rm.inputs = {options.input_dir.string()};
  rm.outputs = {(options.out_dir / "manifest.json").string()};
  rm.content_hash = report.fingerprint;
  write_run_manifest(options.out_dir / "run_manifest.json", rm);

  log << "dataset: " << report.written << " circuits, " << report.skipped.size() << " skipped -> "
      << options.out_dir.string() << "\n";
  return report;
}

TrainReport cmd_train(const TrainOptions& options, std::ostream& log) {
  std::vector<GraphSample> data = load_dataset(options.dataset_dir);
  std::string fingerprint = dataset_fingerprint(options.dataset_dir);

  TrainReport report;
  report.result = train(data, options.config.model, options.config.train, options.arm, &log);

  nlohmann::json extra;
  extra["train_config"] = train_config_json(options.config.train);
  extra["dataset_fingerprint"] = fingerprint;
  extra["best_epoch"] = report.result.best_epoch;
  extra["best_val"] = report.result.best_val;
  extra["final_train_metric"] = report.result.final_train_metric;
  extra["final_val_metric"] = report.result.final_val_metric;

  report.checkpoint_path = options.out_dir / "model.ckpt";
  save_model(report.checkpoint_path, report.result.model, extra.dump());

  std::ostringstream csv;
  csv << "epoch,train_loss,val_metric,seconds\n";
  for (const EpochRecord& rec : report.result.history) {
    csv << rec.epoch << "," << format_real(rec.train_loss) << "," << format_real(rec.val_metric)
        << "," << format_real(rec.seconds) << "\n";
  }
  report.log_path = options.out_dir / "train_log.csv";
  write_text_file(report.log_path, csv.str());

  std::string config_text = serialize_config(options.config);
  RunManifest rm;
  rm.command = "train";
  rm.config_text = config_text;
  rm.seeds = {options.config.train.seed};
  rm.inputs = {options.dataset_dir.string()};
  rm.outputs = {report.checkpoint_path.string(), report.log_path.string()};
  rm.content_hash = sha256_hex(fingerprint + "\n" + config_text + "\n" + to_string(options.arm));
  write_run_manifest(options.out_dir / "run_manifest.json", rm);

  log << "train: best epoch " << report.result.best_epoch << ", val "
      << format_real(report.result.best_val) << ", " << format_real(report.result.seconds)
      << "s -> " << report.checkpoint_path.string() << "\n";
  return report;
}

EvalSplit eval_split_from_string(const std::string& name) {
  if (name == "all") return EvalSplit::All;
  if (name == "train") return EvalSplit::Train;
  if (name == "val") return EvalSplit::Val;
  if (name == "test") return EvalSplit::Test;
  raise(ErrorKind::BadConfig, "unknown split: " + name);
}

namespace {

const char* to_string(EvalSplit split) {
  switch (split) {
    case EvalSplit::All: return "all";
    case EvalSplit::Train: return "train";
    case EvalSplit::Val: return "val";
    case EvalSplit::Test: return "test";
  }
  return "all";
}

}  // namespace

EvalResult cmd_eval(const EvalOptions& options, std::ostream& log) {
  FuncGnn model = load_model(options.checkpoint);
  std::vector<GraphSample> data = load_dataset(options.dataset_dir);
  if (data.empty()) raise(ErrorKind::IoError, "dataset is empty: " + options.dataset_dir.string());
  std::string fingerprint = dataset_fingerprint(options.dataset_dir);

  std::vector<size_t> indices;
  if (options.split == EvalSplit::All) {
    indices = all_indices(data.size());
  } else {
    nlohmann::json meta = nlohmann::json::parse(load_model_meta(options.checkpoint));
    if (!meta.contains("extra") || !meta["extra"].contains("train_config")) {
      raise(ErrorKind::ConfigMismatch, "checkpoint has no training provenance; cannot replay its split");
    }
    if (meta["extra"].value("dataset_fingerprint", "") != fingerprint) {
      raise(ErrorKind::ConfigMismatch, "dataset differs from the checkpoint's training dataset");
    }
    TrainConfig tc = train_config_from_json(meta["extra"]["train_config"]);
    SplitIndices split = split_dataset(data.size(), tc.split, tc.seed);
    if (options.split == EvalSplit::Train) indices = split.train;
    else if (options.split == EvalSplit::Val) indices = split.val;
    else indices = split.test;
  }

  EvalResult result = evaluate(model, data, indices, options.task, options.batch_size);

  if (!options.out_dir.empty()) {
    std::string run_hash = sha256_hex(read_text_file(options.checkpoint) + "\n" + fingerprint +
                                      "\n" + to_string(options.task) + "\n" + to_string(options.split));
    std::ostringstream csv;
    csv << "# run " << run_hash << "\n";
    csv << "name,count,mae\n";
    for (const EvalRow& row : result.rows) {
      csv << row.name << "," << row.count << "," << format_real(row.mae) << "\n";
    }
    csv << "all," << result.total_count << "," << format_real(result.mae) << "\n";
    write_text_file(options.out_dir / "eval.csv", csv.str());

    RunManifest rm;
    rm.command = "eval";
    rm.config_text = std::string("task = ") + to_string(options.task) + "\nsplit = " +
                     to_string(options.split) + "\n";
    rm.inputs = {options.checkpoint.string(), options.dataset_dir.string()};
    rm.outputs = {(options.out_dir / "eval.csv").string()};
    rm.content_hash = run_hash;
    write_run_manifest(options.out_dir / "run_manifest.json", rm);
  }

  log << "eval: " << to_string(options.task) << " " << to_string(options.split) << " mae "
      << format_real(result.mae) << " over " << result.total_count << " items\n";
  return result;
}

std::vector<GradCheckResult> cmd_gradcheck(uint64_t seed, std::ostream& log) {
  std::vector<GradCheckResult> results = gradcheck_suite(seed);
  for (const GradCheckResult& r : results) {
    log << (r.passed ? "PASS" : "FAIL") << " " << r.name << " max_rel_error "
        << format_real(r.error) << "\n";
  }
  log << (gradcheck_passed(results) ? "gradcheck: all checks passed\n"
                                    : "gradcheck: FAILURES detected\n");
  return results;
}

std::vector<AblateRow> cmd_ablate(const std::filesystem::path& dataset_dir,
                                  const std::vector<std::string>& arms, const RunConfig& config,
                                  const std::filesystem::path& out_dir, std::ostream& log) {
  std::vector<Arm> parsed;
  parsed.reserve(arms.size());
  for (const std::string& name : arms) parsed.push_back(arm_from_string(name));
  if (parsed.empty()) raise(ErrorKind::InvalidParams, "ablation needs at least one arm");

  std::vector<GraphSample> data = load_dataset(dataset_dir);
  std::vector<AblateRow> rows;
  for (size_t a = 0; a < parsed.size(); ++a) {
    auto t0 = std::chrono::steady_clock::now();
    AblateRow row;
    row.arm = arms[a];
    RunConfig c = config;
    c.train.task = Task::Spp;
    TrainResult spp = train(data, c.model, c.train, parsed[a]);
    row.spp_mae = evaluate(spp.model, data, spp.split.test, Task::Spp, c.train.batch_size).mae;
    c.train.task = Task::Ttdp;
    TrainResult ttdp = train(data, c.model, c.train, parsed[a]);
    row.ttdp_mae = evaluate(ttdp.model, data, ttdp.split.test, Task::Ttdp, c.train.batch_size).mae;
    row.seconds = elapsed(t0);
    log << "ablate " << row.arm << ": spp " << format_real(row.spp_mae) << " ttdp "
        << format_real(row.ttdp_mae) << " (" << format_real(row.seconds) << "s)\n";
    rows.push_back(row);
  }

  if (!out_dir.empty()) {
    std::ostringstream csv;
    csv << "arm,spp_mae,ttdp_mae,seconds\n";
    for (const AblateRow& row : rows) {
      csv << row.arm << "," << format_real(row.spp_mae) << "," << format_real(row.ttdp_mae) << ","
          << format_real(row.seconds) << "\n";
    }
    write_text_file(out_dir / "ablation.csv", csv.str());

    RunManifest rm;
    rm.command = "ablate";
    rm.config_text = serialize_config(config);
    rm.seeds = {config.train.seed};
    rm.inputs = {dataset_dir.string()};
    rm.outputs = {(out_dir / "ablation.csv").string()};
    rm.content_hash = sha256_hex(dataset_fingerprint(dataset_dir) + "\n" + rm.config_text);
    write_run_manifest(out_dir / "run_manifest.json", rm);
  }
  return rows;
}

std::vector<SweepRow> cmd_sweep_layers(const std::filesystem::path& dataset_dir,
                                       const std::vector<int>& layer_counts,
                                       const std::vector<double>& train_fracs,
                                       const RunConfig& config,
                                       const std::filesystem::path& out_dir, std::ostream& log) {
  if (layer_counts.empty() || train_fracs.empty()) {
    raise(ErrorKind::InvalidParams, "layer sweep needs at least one L and one split fraction");
  }
  for (int L : layer_counts) {
    if (L < 1) raise(ErrorKind::InvalidParams, "layer count must be at least 1");
  }
  for (double f : train_fracs) {
    if (!(f > 0) || !(2 * f < 1)) {
      raise(ErrorKind::BadFractions, "train fraction must satisfy 0 < f and 2f < 1");
    }
  }

  std::vector<GraphSample> data = load_dataset(dataset_dir);
  std::vector<SweepRow> rows;
  for (int L : layer_counts) {
    for (double f : train_fracs) {
      auto t0 = std::chrono::steady_clock::now();
      SweepRow row;
      row.L = L;
      row.train_frac = f;
      RunConfig c = config;
      c.model.L = L;
      c.train.split = {f, f, 1.0 - 2.0 * f};
      c.train.task = Task::Spp;
      TrainResult spp = train(data, c.model, c.train);
      row.spp_mae = evaluate(spp.model, data, spp.split.test, Task::Spp, c.train.batch_size).mae;
      c.train.task = Task::Ttdp;
      TrainResult ttdp = train(data, c.model, c.train);
      row.ttdp_mae = evaluate(ttdp.model, data, ttdp.split.test, Task::Ttdp, c.train.batch_size).mae;
      row.seconds = elapsed(t0);
      log << "sweep L=" << L << " f=" << format_real(f) << ": spp " << format_real(row.spp_mae)
          << " ttdp " << format_real(row.ttdp_mae) << " (" << format_real(row.seconds) << "s)\n";
      rows.push_back(row);
    }
  }

  if (!out_dir.empty()) {
    std::ostringstream csv;
    csv << "L,train_frac,spp_mae,ttdp_mae,seconds\n";
    for (const SweepRow& row : rows) {
      csv << row.L << "," << format_real(row.train_frac) << "," << format_real(row.spp_mae) << ","
          << format_real(row.ttdp_mae) << "," << format_real(row.seconds) << "\n";
    }
    write_text_file(out_dir / "sweep.csv", csv.str());

    RunManifest rm;
    rm.command = "sweep-layers";
    rm.config_text = serialize_config(config);
    rm.seeds = {config.train.seed};
    rm.inputs = {dataset_dir.string()};
    rm.outputs = {(out_dir / "sweep.csv").string()};
    rm.content_hash = sha256_hex(dataset_fingerprint(dataset_dir) + "\n" + rm.config_text);
    write_run_manifest(out_dir / "run_manifest.json", rm);
  }
  return rows;
}

QuartileStats quartile_stats(std::vector<double> values) {
  if (values.size() < 2) raise(ErrorKind::TooFewValues, "quartile stats need at least two values");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(n - 1);
    size_t lo = static_cast<size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return values[n - 1];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  QuartileStats s;
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * s.iqr;
  const double hi_fence = s.q3 + 1.5 * s.iqr;
  s.whisker_low = s.max;
  s.whisker_high = s.min;
  for (double v : values) {
    if (v >= lo_fence) {
      s.whisker_low = v;  // first (smallest) value inside the fence
      break;
    }
  }
  for (size_t i = n; i-- > 0;) {
    if (values[i] <= hi_fence) {
      s.whisker_high = values[i];
      break;
    }
  }
  s.span = s.whisker_high - s.whisker_low;
  return s;
}

StabilityReport cmd_stability(const std::filesystem::path& dataset_dir,
                              const std::vector<uint64_t>& seeds, const RunConfig& config,
                              const std::filesystem::path& out_dir, std::ostream& log) {
  if (seeds.size() < 2) raise(ErrorKind::TooFewSeeds, "stability needs at least two seeds");
  std::vector<GraphSample> data = load_dataset(dataset_dir);

  StabilityReport report;
  std::vector<double> maes;
  for (uint64_t seed : seeds) {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig c = config;
    c.train.seed = seed;
    c.train.patience = c.train.max_epochs;  // the stability study runs without early stopping
    TrainResult r = train(data, c.model, c.train);
    StabilityRow row;
    row.seed = seed;
    row.mae = evaluate(r.model, data, r.split.test, c.train.task, c.train.batch_size).mae;
    row.seconds = elapsed(t0);
    log << "stability seed " << seed << ": mae " << format_real(row.mae) << " ("
        << format_real(row.seconds) << "s)\n";
    maes.push_back(row.mae);
    report.rows.push_back(row);
  }
  report.stats = quartile_stats(maes);

  if (!out_dir.empty()) {
    std::ostringstream csv;
    csv << "seed,mae,seconds\n";
    for (const StabilityRow& row : report.rows) {
      csv << row.seed << "," << format_real(row.mae) << "," << format_real(row.seconds) << "\n";
    }
    write_text_file(out_dir / "stability.csv", csv.str());

    const QuartileStats& s = report.stats;
    std::ostringstream sum;
    sum << "min,q1,median,q3,max,iqr,whisker_low,whisker_high,span\n";
    sum << format_real(s.min) << "," << format_real(s.q1) << "," << format_real(s.median) << ","
        << format_real(s.q3) << "," << format_real(s.max) << "," << format_real(s.iqr) << ","
        << format_real(s.whisker_low) << "," << format_real(s.whisker_high) << ","
        << format_real(s.span) << "\n";
    write_text_file(out_dir / "stability_summary.csv", sum.str());

    RunManifest rm;
    rm.command = "stability";
    rm.config_text = serialize_config(config);
    rm.seeds = seeds;
    rm.inputs = {dataset_dir.string()};
    rm.outputs = {(out_dir / "stability.csv").string(),
                  (out_dir / "stability_summary.csv").string()};
    rm.content_hash = sha256_hex(dataset_fingerprint(dataset_dir) + "\n" + rm.config_text);
    write_run_manifest(out_dir / "run_manifest.json", rm);
  }
  log << "stability: iqr " << format_real(report.stats.iqr) << ", span "
      << format_real(report.stats.span) << "\n";
  return report;
}

std::vector<uint64_t> default_stability_seeds() {
  std::vector<uint64_t> seeds;
  for (uint64_t k = 1; k <= 10; ++k) seeds.push_back(42 * k);
  return seeds;
}

double constant_predictor_mae(const std::vector<GraphSample>& data,
                              std::span<const size_t> indices, double value) {
  double sum = 0.0;
  size_t count = 0;
  for (size_t idx : indices) {
    for (Real p : data[idx].node_probs) {
      sum += std::abs(static_cast<double>(p) - value);
      ++count;
    }
  }
  if (count == 0) raise(ErrorKind::TooFewValues, "no labels to score");
  return sum / static_cast<double>(count);
}

double random_embedding_ttdp_mae(const std::vector<GraphSample>& data,
                                 std::span<const size_t> indices, int hidden, uint64_t seed) {
  if (hidden < 1) raise(ErrorKind::InvalidParams, "hidden must be at least 1");
  double flat = 0.0;
  size_t total = 0;
  for (size_t idx : indices) {
    const GraphSample& sample = data[idx];
    if (sample.pairs.size() < 2) continue;
    SplitMix64 g(derive_seed(seed, idx));
    const size_t n = static_cast<size_t>(sample.tensors.num_nodes);
    std::vector<double> emb(n * static_cast<size_t>(hidden));
    for (double& x : emb) x = g.uniform(-1.0, 1.0);
    std::vector<double> pred(sample.pairs.size());
    std::vector<double> truth(sample.pairs.size());
    for (size_t p = 0; p < sample.pairs.size(); ++p) {
      const double* zi = emb.data() + static_cast<size_t>(sample.pairs[p].i) * hidden;
      const double* zj = emb.data() + static_cast<size_t>(sample.pairs[p].j) * hidden;
      double dot = 0, ni = 0, nj = 0;
      for (int c = 0; c < hidden; ++c) {
        dot += zi[c] * zj[c];
        ni += zi[c] * zi[c];
        nj += zj[c] * zj[c];
      }
      ni = std::sqrt(ni);
      nj = std::sqrt(nj);
      if (ni < 1e-12 || nj < 1e-12) raise(ErrorKind::ZeroEmbedding, "zero random embedding");
      pred[p] = 1.0 - dot / (ni * nj);
      truth[p] = sample.pairs[p].tt_distance;
    }
    std::vector<double> pred_n = zero_norm(pred);
    std::vector<double> truth_n = zero_norm(truth);
    for (size_t p = 0; p < pred_n.size(); ++p) flat += std::abs(pred_n[p] - truth_n[p]);
    total += sample.pairs.size();
  }
  if (total == 0) raise(ErrorKind::TooFewPairs, "no circuits with enough pairs");
  return flat / static_cast<double>(total);
}

}  // namespace funcgnn
