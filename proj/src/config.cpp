// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/config.hpp"

#include <sstream>

#include "funcgnn/error.hpp"
#include "funcgnn/io.hpp"

namespace funcgnn {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& v) { return static_cast<int>(parse_int(v)); }

void apply_model(ModelConfig& m, const std::string& key, const std::string& value) {
  if (key == "L") m.L = to_int(value);
  else if (key == "hidden") m.hidden = to_int(value);
  else if (key == "dropout") m.dropout = parse_double(value);
  else if (key == "d_in") m.d_in = to_int(value);
  else if (key == "readout_hidden") m.readout_hidden = to_int(value);
  else if (key == "readout_depth") m.readout_depth = to_int(value);
  else raise(ErrorKind::BadConfig, "unknown model key: " + key);
}

void apply_train(TrainConfig& t, const std::string& key, const std::string& value) {
  if (key == "lr") t.lr = parse_double(value);
  else if (key == "weight_decay") t.weight_decay = parse_double(value);
  else if (key == "batch_size") t.batch_size = to_int(value);
  else if (key == "max_epochs") t.max_epochs = to_int(value);
  else if (key == "patience") t.patience = to_int(value);
  else if (key == "seed") t.seed = static_cast<uint64_t>(parse_int(value));
  else if (key == "task") t.task = task_from_string(value);
  else if (key == "split") {
    std::istringstream in(value);
    std::string part;
    std::array<double, 3> split{};
    size_t i = 0;
    while (std::getline(in, part, ',')) {
      if (i >= 3) raise(ErrorKind::BadConfig, "split needs exactly three fractions");
      split[i++] = parse_double(trim(part));
    }
    if (i != 3) raise(ErrorKind::BadConfig, "split needs exactly three fractions");
    t.split = split;
  } else {
    raise(ErrorKind::BadConfig, "unknown train key: " + key);
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  RunConfig config = base;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') raise(ErrorKind::BadConfig, "unterminated section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "train") {
        raise(ErrorKind::BadConfig, "unknown section: " + section);
      }
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      raise(ErrorKind::BadConfig, "line " + std::to_string(line_no) + " is not key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) raise(ErrorKind::BadConfig, "empty key on line " + std::to_string(line_no));
    if (section == "model") apply_model(config.model, key, value);
    else if (section == "train") apply_train(config.train, key, value);
    else raise(ErrorKind::BadConfig, "key outside a section: " + key);
  }
  config.model.check();
  config.train.check();
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  return parse_config_text(read_text_file(path), base);
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  out << "[model]\n";
  out << "L = " << config.model.L << "\n";
  out << "hidden = " << config.model.hidden << "\n";
  out << "dropout = " << format_real(config.model.dropout) << "\n";
  out << "d_in = " << config.model.d_in << "\n";
  out << "readout_hidden = " << config.model.readout_hidden << "\n";
  out << "readout_depth = " << config.model.readout_depth << "\n";
  out << "\n[train]\n";
  out << "lr = " << format_real(config.train.lr) << "\n";
  out << "weight_decay = " << format_real(config.train.weight_decay) << "\n";
  out << "batch_size = " << config.train.batch_size << "\n";
  out << "max_epochs = " << config.train.max_epochs << "\n";
  out << "patience = " << config.train.patience << "\n";
  out << "split = " << format_real(config.train.split[0]) << ", " << format_real(config.train.split[1])
      << ", " << format_real(config.train.split[2]) << "\n";
  out << "task = " << to_string(config.train.task) << "\n";
  out << "seed = " << config.train.seed << "\n";
  return out.str();
}

}  // namespace funcgnn
