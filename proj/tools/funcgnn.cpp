// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numerical-check failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "funcgnn/harness.hpp"

namespace {

using namespace funcgnn;

int exit_code_for(const Error& err) {
  switch (err.kind()) {
    case ErrorKind::BadConfig:
    case ErrorKind::UnknownArm:
    case ErrorKind::TooFewSeeds:
    case ErrorKind::BadFractions:
    case ErrorKind::InvalidParams:
      return 1;
    default:
      return 2;
  }
}

LabelPolicy::Mode label_mode_from_string(const std::string& name) {
  if (name == "auto") return LabelPolicy::Mode::Auto;
  if (name == "exact") return LabelPolicy::Mode::Exact;
  if (name == "sampled") return LabelPolicy::Mode::Sampled;
  raise(ErrorKind::BadConfig, "unknown label mode: " + name);
}

void require_out(const std::string& out_dir) {
  if (out_dir.empty()) raise(ErrorKind::BadConfig, "missing --out <dir>");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FuncGNN: circuit representation learning on and-inverter graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  uint64_t seed = 1;
  bool seed_given = false;
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  app.add_option("--seed", seed, "base RNG seed")->each([&](const std::string&) { seed_given = true; });
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker budget (advisory; runs execute sequentially)");

  // dataset
  auto* cd = app.add_subcommand("dataset", "generate or ingest a labeled circuit corpus");
  std::string input_dir;
  CorpusParams corpus;
  std::string label_mode = "auto";
  LabelPolicy policy;
  cd->add_option("--input", input_dir, "directory of .aag files to ingest (default: generate)");
  cd->add_option("--count", corpus.count, "generated circuit count");
  cd->add_option("--min-inputs", corpus.min_inputs);
  cd->add_option("--max-inputs", corpus.max_inputs);
  cd->add_option("--min-ands", corpus.min_ands);
  cd->add_option("--max-ands", corpus.max_ands);
  cd->add_option("--invert-min", corpus.invert_min);
  cd->add_option("--invert-max", corpus.invert_max);
  cd->add_option("--label-mode", label_mode, "auto|exact|sampled");
  cd->add_option("--samples", policy.sample_count, "patterns per circuit when sampling");
  cd->add_option("--exact-cap", policy.exact_input_cap, "max inputs for exhaustive labels");
  cd->add_option("--pair-factor", policy.pair_factor, "pair budget per node");
  cd->add_option("--max-nodes", policy.max_nodes, "reject circuits above this size");

  // train
  auto* ct = app.add_subcommand("train", "train one model on a dataset");
  std::string data_dir;
  std::string task_name;
  std::string arm_name = "full";
  ct->add_option("--data", data_dir, "dataset directory")->required();
  ct->add_option("--task", task_name, "spp|ttdp (overrides the config file)");
  ct->add_option("--arm", arm_name, "model variant to train");

  // eval
  auto* ce = app.add_subcommand("eval", "score a checkpoint on a dataset");
  std::string checkpoint;
  std::string eval_task = "spp";
  std::string eval_split = "all";
  int batch_size = 128;
  ce->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  ce->add_option("--data", data_dir, "dataset directory")->required();
  ce->add_option("--task", eval_task, "spp|ttdp");
  ce->add_option("--split", eval_split, "all|train|val|test (non-all replays the training split)");
  ce->add_option("--batch", batch_size, "evaluation batch size");

  // gradcheck
  auto* cg = app.add_subcommand("gradcheck", "finite-difference check of every primitive");
  (void)cg;

  // ablate
  auto* ca = app.add_subcommand("ablate", "train the ablation arms under one config");
  std::vector<std::string> arms;
  ca->add_option("--data", data_dir, "dataset directory")->required();
  ca->add_option("--arms", arms, "arm names (default: all)")->delimiter(',');

  // sweep-layers
  auto* cs = app.add_subcommand("sweep-layers", "grid over depth and split fraction");
  std::vector<int> layers = {1, 3, 5, 7, 9};
  std::vector<double> fracs = {0.05};
  cs->add_option("--data", data_dir, "dataset directory")->required();
  cs->add_option("--layers", layers, "layer counts")->delimiter(',');
  cs->add_option("--fracs", fracs, "train (= val) fractions")->delimiter(',');

  // stability
  auto* cst = app.add_subcommand("stability", "per-seed variance study");
  std::vector<uint64_t> seeds;
  cst->add_option("--data", data_dir, "dataset directory")->required();
  cst->add_option("--seeds", seeds, "seed list (default: 42,84,...,420)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (threads < 1) raise(ErrorKind::BadConfig, "--threads must be at least 1");
    if (threads > 1) std::cout << "note: --threads is advisory; runs execute sequentially\n";

    RunConfig config;
    if (!config_path.empty()) config = load_config_file(config_path);
    if (seed_given) config.train.seed = seed;

    if (app.got_subcommand(cd)) {
      require_out(out_dir);
      DatasetOptions options;
      options.out_dir = out_dir;
      options.input_dir = input_dir;
      options.corpus = corpus;
      options.policy = policy;
      options.policy.mode = label_mode_from_string(label_mode);
      options.seed = seed;
      cmd_dataset(options, std::cout);
    } else if (app.got_subcommand(ct)) {
      require_out(out_dir);
      TrainOptions options;
      options.dataset_dir = data_dir;
      options.out_dir = out_dir;
      if (!task_name.empty()) config.train.task = task_from_string(task_name);
      options.config = config;
      options.arm = arm_from_string(arm_name);
      cmd_train(options, std::cout);
    } else if (app.got_subcommand(ce)) {
      require_out(out_dir);
      EvalOptions options;
      options.checkpoint = checkpoint;
      options.dataset_dir = data_dir;
      options.out_dir = out_dir;
      options.task = task_from_string(eval_task);
      options.split = eval_split_from_string(eval_split);
      if (batch_size < 1) raise(ErrorKind::BadConfig, "--batch must be at least 1");
      options.batch_size = batch_size;
      cmd_eval(options, std::cout);
    } else if (app.got_subcommand(cg)) {
      std::vector<GradCheckResult> results = cmd_gradcheck(seed, std::cout);
      if (!gradcheck_passed(results)) return 3;
    } else if (app.got_subcommand(ca)) {
      require_out(out_dir);
      if (arms.empty()) {
        for (Arm arm : all_arms()) arms.push_back(to_string(arm));
      }
      cmd_ablate(data_dir, arms, config, out_dir, std::cout);
    } else if (app.got_subcommand(cs)) {
      require_out(out_dir);
      cmd_sweep_layers(data_dir, layers, fracs, config, out_dir, std::cout);
    } else if (app.got_subcommand(cst)) {
      require_out(out_dir);
      if (seeds.empty()) seeds = default_stability_seeds();
      cmd_stability(data_dir, seeds, config, out_dir, std::cout);
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
