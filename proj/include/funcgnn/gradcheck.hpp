// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "funcgnn/tensor.hpp"

namespace funcgnn {

/// Compares reverse-mode gradients against central finite differences.
/// `build` must construct a fresh scalar loss from the current leaf values
/// on every call; the leaves are perturbed in place. Per-element error is
/// |analytic - fd| / max(|analytic|, |fd|, 1e-6); the maximum over all leaf
/// elements is returned.
///
/// Elements whose error exceeds refine_threshold are probed again at
/// fd_eps / 16 and at 4 * fd_eps and keep the smallest error. A wrong
/// derivative disagrees at every step size, so it still surfaces; a first
/// probe that straddled a relu-style kink converges with the step, and a
/// roundoff-dominated probe converges against it, so both artifacts drop
/// out.
double max_rel_error(const std::function<Tensor()>& build, const std::vector<Tensor>& leaves,
                     double fd_eps = 1e-5, double refine_threshold = 5e-5);

struct GradCheckResult {
  std::string name;
  double error = 0.0;
  bool passed = false;
};

/// Finite-difference suite over every primitive and the composed model,
/// plus one negative control (a deliberately biased gelu derivative) whose
/// entry passes only when the bias is detected. All entries are
/// deterministic given the seed.
std::vector<GradCheckResult> gradcheck_suite(uint64_t seed, double tolerance = 1e-4);

bool gradcheck_passed(const std::vector<GradCheckResult>& results);

}  // namespace funcgnn
