// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <utility>

#include "funcgnn/error.hpp"

namespace funcgnn::test {

/// Runs fn and reports the ErrorKind it throws, if any.
template <typename Fn>
std::optional<ErrorKind> thrown_kind(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace funcgnn::test
