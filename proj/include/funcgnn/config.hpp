// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "funcgnn/model.hpp"
#include "funcgnn/train.hpp"

namespace funcgnn {

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
};

/// key = value files with [model] and [train] sections; keys mirror the
/// struct field names ("split" takes a comma triple, "task" spp or ttdp).
/// '#' starts a comment. Unknown sections, keys or unparsable values are
/// BadConfig.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});
std::string serialize_config(const RunConfig& config);

}  // namespace funcgnn
