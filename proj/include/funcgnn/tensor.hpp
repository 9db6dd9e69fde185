// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "funcgnn/error.hpp"

namespace funcgnn {

// Global numerics mode: double by default (the mode every frozen tolerance
// in the test suite assumes); -DFUNCGNN_REAL32 rebuilds the whole engine in
// single precision for cheaper training runs.
#ifdef FUNCGNN_REAL32
using Real = float;
#else
using Real = double;
#endif

using Shape = std::vector<size_t>;

namespace detail {

struct TensorNode {
  Shape shape;
  std::vector<Real> values;
  std::vector<Real> grad;
  bool requires_grad = false;
  bool backward_started = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backprop;

  size_t numel() const { return values.size(); }
  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), Real(0));
  }
};

}  // namespace detail

/// Reverse-mode tensor: a shared handle to one node of the computation
/// graph. Ops build fresh nodes; backward() walks the graph once and
/// accumulates gradients into every requires_grad tensor it reaches.
class Tensor {
 public:
  Tensor() = default;

  static Tensor from_values(Shape shape, std::vector<Real> values, bool requires_grad = false);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, Real value, bool requires_grad = false);
  static Tensor scalar(Real value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  size_t numel() const { return node_->values.size(); }
  size_t rows() const { return node_->shape.empty() ? 1 : node_->shape[0]; }
  size_t cols() const { return node_->shape.size() < 2 ? 1 : node_->shape[1]; }
  bool requires_grad() const { return node_->requires_grad; }

  std::vector<Real>& values() { return node_->values; }
  const std::vector<Real>& values() const { return node_->values; }
  Real item() const;

  bool has_grad() const { return node_->grad.size() == node_->values.size(); }
  const std::vector<Real>& grad() const;
  void zero_grad() { node_->grad.assign(node_->values.size(), Real(0)); }

  detail::TensorNode* node() const { return node_.get(); }
  const std::shared_ptr<detail::TensorNode>& handle() const { return node_; }
  static Tensor wrap(std::shared_ptr<detail::TensorNode> node);

 private:
  std::shared_ptr<detail::TensorNode> node_;
};

/// Scoped autograd switch. While an instance lives, ops record no parents
/// and produce requires_grad=false tensors, so evaluation-only forwards
/// free every intermediate as soon as it goes out of scope. Nesting
/// restores the previous state on destruction.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Row ranges of a node matrix, one per graph: graph g owns rows
/// [offsets[g], offsets[g+1]). Offsets start at 0, never decrease and end
/// at the row count.
struct Segments {
  std::vector<int64_t> offsets;

  int64_t num_graphs() const { return static_cast<int64_t>(offsets.size()) - 1; }
  void check(size_t num_rows) const;
};

// ---- primitives ----------------------------------------------------------

/// y = x W + b with x [N,a], W [a,b], b [b].
Tensor affine(const Tensor& x, const Tensor& W, const Tensor& b);

Tensor add(const Tensor& x, const Tensor& y);
/// Elementwise (Hadamard) product of equal-shaped tensors.
Tensor mul(const Tensor& x, const Tensor& y);
Tensor add_const(const Tensor& x, Real c);
/// y = x - c elementwise; c is constant data of matching length.
Tensor sub_const(const Tensor& x, std::span<const Real> c);

/// y[r,c] = x[r,c] * v[c].
Tensor mul_rowvec(const Tensor& x, const Tensor& v);
/// y = x * s with s a one-element tensor.
Tensor mul_scalar(const Tensor& x, const Tensor& s);

Tensor relu(const Tensor& x);
/// Exact gelu: x * Phi(x) with the Gaussian CDF via erfc.
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor abs(const Tensor& x);

/// Per-row standardization followed by a learned elementwise affine map.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real eps = Real(1e-5));

/// Standardizes each column within each graph segment: zero mean, unit
/// variance (population, epsilon-guarded).
Tensor graph_standardize(const Tensor& x, const Segments& segments, Real eps = Real(1e-5));

/// y[v,c] = x[v,c] * scale[g(v),c] + shift[g(v),c] where g(v) is the segment
/// owning row v.
Tensor segment_scale_shift(const Tensor& x, const Tensor& scale, const Tensor& shift,
                           const Segments& segments);

/// out[v] = mean over incoming edges e=(src->v) of sign_e * x[src_e].
/// Nodes without incoming edges get a zero row.
Tensor signed_scatter_mean(const Tensor& x, const std::vector<int32_t>& src,
                           const std::vector<int32_t>& dst, const std::vector<Real>& sign);

/// out[v] = sum over incoming edges of x[src_e].
Tensor scatter_sum(const Tensor& x, const std::vector<int32_t>& src,
                   const std::vector<int32_t>& dst);

/// out[v] = sum over incoming edges of weight_e * x[src_e].
Tensor scatter_weighted_sum(const Tensor& x, const std::vector<int32_t>& src,
                            const std::vector<int32_t>& dst, const std::vector<Real>& weight);

/// Inverted dropout. Training mode draws a Bernoulli keep mask from
/// SplitMix64(seed) in row-major element order and scales kept entries by
/// 1/(1-rate); inference mode is the identity.
Tensor dropout(const Tensor& x, double rate, bool training, uint64_t seed);

/// Concatenates matrices with equal row counts along columns.
Tensor concat_rows(const std::vector<Tensor>& xs);

/// out[p] = 1 - cos(z[i_p], z[j_p]). Throws ZeroEmbedding (naming the node)
/// when a referenced row has norm below 1e-12.
Tensor pair_cosine_distance(const Tensor& z, const std::vector<std::pair<int32_t, int32_t>>& pairs);

/// Differentiable standardization of the whole tensor: (x - mean) /
/// population std, mean removal alone when the deviation is below 1e-12.
Tensor zero_norm_t(const Tensor& x);

Tensor mean_all(const Tensor& x);
Tensor sum_all(const Tensor& x);

/// Reverse-mode sweep from a scalar loss. Gradients accumulate into every
/// requires_grad tensor reachable from it. A second sweep from the same
/// loss without rebuilding the graph throws DoubleBackward.
void backward(const Tensor& loss);

// ---- parameter store ------------------------------------------------------

/// Named parameter tensors in insertion order.
class ParamStore {
 public:
  Tensor& add(const std::string& name, Tensor t);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return map_.count(name) > 0; }
  const std::vector<std::string>& names() const { return order_; }
  size_t size() const { return order_.size(); }
  size_t total_parameters() const;
  void zero_grads();
  /// Deep copy with fresh leaf tensors (values only, no grads).
  ParamStore clone() const;

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, Tensor> map_;
};

}  // namespace funcgnn
