// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/checkpoint.hpp"

#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "funcgnn/error.hpp"
#include "funcgnn/io.hpp"

namespace funcgnn {

namespace {

constexpr char kMagic[8] = {'F', 'G', 'N', 'N', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

struct Reader {
  const std::string& bytes;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > bytes.size()) raise(ErrorKind::IoError, "truncated checkpoint");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v = 0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string str(size_t n) {
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void save_params(const std::filesystem::path& path, const ParamStore& params,
                 const std::string& meta_json) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(meta_json.size()));
  out.append(meta_json);
  put_u32(out, static_cast<uint32_t>(params.size()));
  for (const std::string& name : params.names()) {
    const Tensor& t = params.at(name);
    put_u32(out, static_cast<uint32_t>(name.size()));
    out.append(name);
    put_u32(out, static_cast<uint32_t>(t.shape().size()));
    for (size_t d : t.shape()) put_u64(out, d);
    for (Real v : t.values()) put_f64(out, static_cast<double>(v));
  }
  write_text_file(path, out);
}

std::pair<ParamStore, std::string> load_params(const std::filesystem::path& path) {
  std::string bytes = read_text_file(path);
  Reader r{bytes};
  if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    raise(ErrorKind::IoError, "not a checkpoint: " + path.string());
  }
  uint32_t version = r.u32();
  if (version != kVersion) {
    raise(ErrorKind::IoError, "unsupported checkpoint version " + std::to_string(version));
  }
  std::string meta = r.str(r.u32());
  uint32_t count = r.u32();
  ParamStore store;
  for (uint32_t e = 0; e < count; ++e) {
    std::string name = r.str(r.u32());
    uint32_t rank = r.u32();
    Shape shape(rank);
    size_t n = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      shape[d] = static_cast<size_t>(r.u64());
      n *= shape[d];
    }
    std::vector<Real> values(n);
    for (size_t i = 0; i < n; ++i) values[i] = static_cast<Real>(r.f64());
    store.add(name, Tensor::from_values(std::move(shape), std::move(values), true));
  }
  if (r.pos != bytes.size()) raise(ErrorKind::IoError, "trailing bytes in checkpoint");
  return {std::move(store), std::move(meta)};
}

void save_model(const std::filesystem::path& path, const FuncGnn& model,
                const std::string& extra_meta_json) {
  nlohmann::json meta;
  meta["format"] = "funcgnn-model";
  meta["model"]["L"] = model.config().L;
  meta["model"]["hidden"] = model.config().hidden;
  meta["model"]["dropout"] = model.config().dropout;
  meta["model"]["d_in"] = model.config().d_in;
  meta["model"]["readout_hidden"] = model.config().readout_hidden;
  meta["model"]["readout_depth"] = model.config().readout_depth;
  meta["arm"] = to_string(model.arm());
  meta["ratio_mean"] = static_cast<double>(model.ratio_stats().mean);
  meta["ratio_stddev"] = static_cast<double>(model.ratio_stats().stddev);
  if (!extra_meta_json.empty()) meta["extra"] = nlohmann::json::parse(extra_meta_json);
  save_params(path, model.params(), meta.dump());
}

FuncGnn load_model(const std::filesystem::path& path) {
  auto [store, meta_text] = load_params(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_text);
  } catch (const std::exception&) {
    raise(ErrorKind::IoError, "checkpoint meta is not JSON");
  }
  if (meta.value("format", "") != "funcgnn-model") {
    raise(ErrorKind::ConfigMismatch, "checkpoint is not a model checkpoint");
  }
  ModelConfig config;
  config.L = meta["model"]["L"].get<int>();
  config.hidden = meta["model"]["hidden"].get<int>();
  config.dropout = meta["model"]["dropout"].get<double>();
  config.d_in = meta["model"]["d_in"].get<int>();
  config.readout_hidden = meta["model"]["readout_hidden"].get<int>();
  config.readout_depth = meta["model"]["readout_depth"].get<int>();
  FuncGnn model(config, arm_from_string(meta["arm"].get<std::string>()));
  model.init_params(0);
  model.ratio_stats().mean = static_cast<Real>(meta["ratio_mean"].get<double>());
  model.ratio_stats().stddev = static_cast<Real>(meta["ratio_stddev"].get<double>());
  ParamStore& params = model.params();
  if (store.size() != params.size()) {
    raise(ErrorKind::ConfigMismatch, "checkpoint holds " + std::to_string(store.size()) +
                                         " tensors, model expects " + std::to_string(params.size()));
  }
  for (const std::string& name : params.names()) {
    if (!store.contains(name)) raise(ErrorKind::ConfigMismatch, "checkpoint misses tensor " + name);
    Tensor& dst = params.at(name);
    Tensor& src = store.at(name);
    if (src.shape() != dst.shape()) {
      raise(ErrorKind::ConfigMismatch, "shape mismatch for tensor " + name);
    }
    dst.values() = src.values();
  }
  return model;
}

std::string load_model_meta(const std::filesystem::path& path) {
  return load_params(path).second;
}

}  // namespace funcgnn
