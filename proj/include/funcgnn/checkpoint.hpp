// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include "funcgnn/model.hpp"
#include "funcgnn/tensor.hpp"

namespace funcgnn {

/// Checkpoint container, all integers and floats little-endian:
///
///   bytes 0..7   magic "FGNNCKPT"
///   u32          format version (currently 1)
///   u32          meta length, then that many bytes of UTF-8 JSON
///   u32          entry count
///   per entry:
///     u32        name length, then the name bytes
///     u32        rank, then rank u64 dimensions
///     f64[n]     row-major values (IEEE 754), n = product of dimensions
///
/// Values are stored as 64-bit floats regardless of the build's Real type;
/// a float build round-trips through the nearest representable values.
void save_params(const std::filesystem::path& path, const ParamStore& params,
                 const std::string& meta_json);
std::pair<ParamStore, std::string> load_params(const std::filesystem::path& path);

/// Model checkpoints carry the architecture config, ablation arm, ratio
/// standardization constants and optional training provenance in the meta
/// block, so a loaded model is ready for inference.
void save_model(const std::filesystem::path& path, const FuncGnn& model,
                const std::string& extra_meta_json = "");
FuncGnn load_model(const std::filesystem::path& path);
std::string load_model_meta(const std::filesystem::path& path);

}  // namespace funcgnn
