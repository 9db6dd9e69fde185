// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/dataset.hpp"

#include <sstream>
#include <utility>

#include <json.hpp>

#include "funcgnn/error.hpp"
#include "funcgnn/io.hpp"
#include "funcgnn/rng.hpp"

namespace funcgnn {

Aig corpus_circuit(const CorpusParams& params, uint64_t seed, int index) {
  if (params.count <= 0 || index < 0 || index >= params.count) {
    raise(ErrorKind::InvalidParams, "corpus index out of range");
  }
  if (params.min_inputs < 2 || params.max_inputs < params.min_inputs || params.min_ands < 0 ||
      params.max_ands < params.min_ands || params.invert_min < 0 ||
      params.invert_max < params.invert_min || params.invert_max > 1) {
    raise(ErrorKind::InvalidParams, "corpus parameter ranges are malformed");
  }
  // Per-slot sub-stream; draw order: inputs, gates, inversion rate, circuit seed.
  SplitMix64 g(derive_seed(seed, static_cast<uint64_t>(index)));
  int32_t n_inputs = params.min_inputs +
                     static_cast<int32_t>(g.below(static_cast<uint64_t>(params.max_inputs - params.min_inputs) + 1));
  int32_t n_ands = params.min_ands +
                   static_cast<int32_t>(g.below(static_cast<uint64_t>(params.max_ands - params.min_ands) + 1));
  double invert = g.uniform(params.invert_min, params.invert_max);
  return random_aig(g.next_u64(), n_inputs, n_ands, invert);
}

DatasetEntry build_entry(std::string name, Aig aig, const LabelPolicy& policy,
                         uint64_t label_seed) {
  if (aig.num_nodes() > policy.max_nodes) {
    raise(ErrorKind::InvalidParams, "circuit " + name + " exceeds the node budget");
  }
  bool exact = false;
  switch (policy.mode) {
    case LabelPolicy::Mode::Exact: exact = true; break;
    case LabelPolicy::Mode::Sampled: exact = false; break;
    case LabelPolicy::Mode::Auto: exact = aig.num_inputs <= policy.exact_input_cap; break;
  }
  LabelSet labels = exact ? exact_labels(aig, policy.exact_input_cap)
                          : mc_labels(aig, policy.sample_count, label_seed);
  uint64_t pair_budget = policy.pair_factor * static_cast<uint64_t>(aig.num_nodes());
  std::vector<PairLabel> pairs = sample_pairs(aig, labels, pair_budget, derive_seed(label_seed, 1));

  DatasetEntry entry;
  entry.name = std::move(name);
  entry.mode = labels.mode;
  entry.sample.name = entry.name;
  entry.sample.tensors = to_graph_tensors(aig, true);
  entry.sample.node_probs.assign(labels.node_probs.begin(), labels.node_probs.end());
  entry.sample.pairs = std::move(pairs);
  entry.aig = std::move(aig);
  return entry;
}

namespace {

std::string labels_csv(const std::vector<Real>& probs) {
  std::ostringstream out;
  out << "# node_id,prob\n";
  for (size_t v = 0; v < probs.size(); ++v) {
    out << v << "," << format_real(static_cast<double>(probs[v])) << "\n";
  }
  return out.str();
}

std::string pairs_csv(const std::vector<PairLabel>& pairs) {
  std::ostringstream out;
  out << "# i,j,tt_dist\n";
  for (const PairLabel& p : pairs) {
    out << p.i << "," << p.j << "," << format_real(p.tt_distance) << "\n";
  }
  return out.str();
}

}  // namespace

void write_dataset(const std::filesystem::path& dir, const std::vector<DatasetEntry>& entries,
                   const std::string& settings_json, const std::string& run_hash) {
  nlohmann::json manifest;
  manifest["format"] = "funcgnn-dataset";
  manifest["version"] = 1;
  manifest["run"] = run_hash;
  manifest["settings"] = settings_json.empty() ? nlohmann::json::object()
                                               : nlohmann::json::parse(settings_json);
  manifest["entries"] = nlohmann::json::array();
  for (const DatasetEntry& entry : entries) {
    write_text_file(dir / "circuits" / (entry.name + ".aag"), serialize_aag(entry.aig));
    write_text_file(dir / "labels" / (entry.name + ".csv"), labels_csv(entry.sample.node_probs));
    write_text_file(dir / "pairs" / (entry.name + ".csv"), pairs_csv(entry.sample.pairs));
    nlohmann::json row;
    row["name"] = entry.name;
    row["inputs"] = entry.aig.num_inputs;
    row["ands"] = entry.aig.num_ands;
    row["label_mode"] = entry.mode.kind == LabelMode::Kind::Exact ? "exact" : "sampled";
    row["label_seed"] = entry.mode.seed;
    row["patterns"] = entry.mode.pattern_count;
    row["pair_count"] = entry.sample.pairs.size();
    manifest["entries"].push_back(row);
  }
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<GraphSample> load_dataset(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    raise(ErrorKind::IoError, "manifest.json is not JSON: " + dir.string());
  }
  if (manifest.value("format", "") != "funcgnn-dataset") {
    raise(ErrorKind::IoError, "not a dataset directory: " + dir.string());
  }
  std::vector<GraphSample> samples;
  for (const nlohmann::json& row : manifest["entries"]) {
    std::string name = row["name"].get<std::string>();
    Aig aig = parse_aag_file(dir / "circuits" / (name + ".aag"));
    GraphSample sample;
    sample.name = name;
    sample.tensors = to_graph_tensors(aig, true);

    auto label_rows = read_csv(dir / "labels" / (name + ".csv"));
    if (label_rows.size() != static_cast<size_t>(aig.num_nodes())) {
      raise(ErrorKind::LengthMismatch, "label count mismatch for " + name);
    }
    sample.node_probs.resize(label_rows.size());
    for (size_t i = 0; i < label_rows.size(); ++i) {
      if (label_rows[i].size() != 2 || parse_int(label_rows[i][0]) != static_cast<int64_t>(i)) {
        raise(ErrorKind::IoError, "malformed label row in " + name);
      }
      sample.node_probs[i] = static_cast<Real>(parse_double(label_rows[i][1]));
    }

    auto pair_rows = read_csv(dir / "pairs" / (name + ".csv"));
    sample.pairs.reserve(pair_rows.size());
    for (const auto& fields : pair_rows) {
      if (fields.size() != 3) raise(ErrorKind::IoError, "malformed pair row in " + name);
      PairLabel p;
      p.i = static_cast<int32_t>(parse_int(fields[0]));
      p.j = static_cast<int32_t>(parse_int(fields[1]));
      p.tt_distance = parse_double(fields[2]);
      if (p.i < 0 || p.j < 0 || p.i >= aig.num_nodes() || p.j >= aig.num_nodes()) {
        raise(ErrorKind::IndexOutOfRange, "pair node out of range in " + name);
      }
      sample.pairs.push_back(p);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace funcgnn
