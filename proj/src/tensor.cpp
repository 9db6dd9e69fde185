// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "funcgnn/rng.hpp"

namespace funcgnn {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

namespace {

using detail::TensorNode;

size_t shape_numel(const Shape& shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

void require_matrix(const Tensor& t, const char* what) {
  if (t.shape().size() != 2)
    raise(ErrorKind::ShapeMismatch, std::string(what) + " must be a matrix, got " +
                                        shape_str(t.shape()));
}

void require_vector(const Tensor& t, size_t len, const char* what) {
  if (t.shape().size() != 1 || t.shape()[0] != len)
    raise(ErrorKind::ShapeMismatch, std::string(what) + " must be a vector of length " +
                                        std::to_string(len) + ", got " + shape_str(t.shape()));
}

/// Builds an op node. Parents and the backward body are dropped entirely
/// when no parent needs gradients.
Tensor make_node(Shape shape, std::vector<Real> values, std::vector<Tensor> parents,
                 std::function<void(TensorNode&)> backprop) {
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  for (const Tensor& p : parents) node->requires_grad = node->requires_grad || p.requires_grad();
  if (!grad_enabled()) node->requires_grad = false;
  if (node->requires_grad) {
    node->parents.reserve(parents.size());
    for (const Tensor& p : parents) node->parents.push_back(p.handle());
    node->backprop = std::move(backprop);
  }
  return Tensor::wrap(node);
}

// C[M,N] += A[M,K] * B[K,N]
void matmul_acc(const Real* a, const Real* b, Real* c, size_t m, size_t k_dim, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const Real* arow = a + i * k_dim;
    Real* crow = c + i * n;
    for (size_t k = 0; k < k_dim; ++k) {
      const Real av = arow[k];
      const Real* brow = b + k * n;
      for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C[M,N] += A[M,K] * B[N,K]^T
void matmul_abt_acc(const Real* a, const Real* b, Real* c, size_t m, size_t k_dim, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const Real* arow = a + i * k_dim;
    for (size_t j = 0; j < n; ++j) {
      const Real* brow = b + j * k_dim;
      Real acc = 0;
      for (size_t k = 0; k < k_dim; ++k) acc += arow[k] * brow[k];
      c[i * n + j] += acc;
    }
  }
}

// C[K,N] += A[M,K]^T * B[M,N]
void matmul_atb_acc(const Real* a, const Real* b, Real* c, size_t m, size_t k_dim, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const Real* arow = a + i * k_dim;
    const Real* brow = b + i * n;
    for (size_t k = 0; k < k_dim; ++k) {
      const Real av = arow[k];
      Real* crow = c + k * n;
      for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void check_edges(const std::vector<int32_t>& src, const std::vector<int32_t>& dst, size_t extra,
                 size_t extra_len, size_t n, const char* what) {
  if (src.size() != dst.size() || (extra && extra_len != src.size()))
    raise(ErrorKind::ShapeMismatch, std::string(what) + ": edge arrays differ in length");
  for (size_t e = 0; e < src.size(); ++e) {
    if (src[e] < 0 || static_cast<size_t>(src[e]) >= n || dst[e] < 0 ||
        static_cast<size_t>(dst[e]) >= n)
      raise(ErrorKind::IndexOutOfRange, std::string(what) + ": edge " + std::to_string(e) +
                                            " references node outside [0, " + std::to_string(n) +
                                            ")");
  }
}

}  // namespace

// ---- Tensor ---------------------------------------------------------------

Tensor Tensor::wrap(std::shared_ptr<detail::TensorNode> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

Tensor Tensor::from_values(Shape shape, std::vector<Real> values, bool requires_grad) {
  if (shape_numel(shape) != values.size())
    raise(ErrorKind::ShapeMismatch, "value count " + std::to_string(values.size()) +
                                        " does not fill shape " + shape_str(shape));
  auto node = std::make_shared<detail::TensorNode>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return wrap(std::move(node));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const size_t n = shape_numel(shape);
  return from_values(std::move(shape), std::vector<Real>(n, Real(0)), requires_grad);
}

Tensor Tensor::full(Shape shape, Real value, bool requires_grad) {
  const size_t n = shape_numel(shape);
  return from_values(std::move(shape), std::vector<Real>(n, value), requires_grad);
}

Tensor Tensor::scalar(Real value, bool requires_grad) {
  return from_values({1}, {value}, requires_grad);
}

Real Tensor::item() const {
  if (numel() != 1)
    raise(ErrorKind::NotScalar, "item() on tensor of shape " + shape_str(shape()));
  return node_->values[0];
}

const std::vector<Real>& Tensor::grad() const {
  if (!has_grad())
    raise(ErrorKind::ShapeMismatch, "gradient has not been populated");
  return node_->grad;
}

void Segments::check(size_t num_rows) const {
  if (offsets.size() < 2 || offsets.front() != 0)
    raise(ErrorKind::SegmentMismatch, "segment offsets must start at 0");
  for (size_t g = 1; g < offsets.size(); ++g)
    if (offsets[g] < offsets[g - 1])
      raise(ErrorKind::SegmentMismatch, "segment offsets must not decrease");
  if (offsets.back() != static_cast<int64_t>(num_rows))
    raise(ErrorKind::SegmentMismatch, "segments cover " + std::to_string(offsets.back()) +
                                          " rows, tensor has " + std::to_string(num_rows));
}

// ---- ops -------------------------------------------------------------------

Tensor affine(const Tensor& x, const Tensor& W, const Tensor& b) {
  require_matrix(x, "affine input");
  require_matrix(W, "affine weight");
  const size_t n = x.shape()[0], in = x.shape()[1], out = W.shape()[1];
  if (W.shape()[0] != in)
    raise(ErrorKind::ShapeMismatch, "affine: input " + shape_str(x.shape()) +
                                        " does not match weight " + shape_str(W.shape()));
  require_vector(b, out, "affine bias");

  std::vector<Real> y(n * out);
  for (size_t i = 0; i < n; ++i) std::copy(b.values().begin(), b.values().end(), y.begin() + i * out);
  matmul_acc(x.values().data(), W.values().data(), y.data(), n, in, out);

  return make_node({n, out}, std::move(y), {x, W, b}, [n, in, out](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    TensorNode& pw = *node.parents[1];
    TensorNode& pb = *node.parents[2];
    const Real* g = node.grad.data();
    if (px.requires_grad) {
      px.ensure_grad();
      matmul_abt_acc(g, pw.values.data(), px.grad.data(), n, out, in);
    }
    if (pw.requires_grad) {
      pw.ensure_grad();
      matmul_atb_acc(px.values.data(), g, pw.grad.data(), n, in, out);
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < out; ++j) pb.grad[j] += g[i * out + j];
    }
  });
}

Tensor add(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape())
    raise(ErrorKind::ShapeMismatch,
          "add: " + shape_str(x.shape()) + " vs " + shape_str(y.shape()));
  std::vector<Real> v(x.numel());
  for (size_t i = 0; i < v.size(); ++i) v[i] = x.values()[i] + y.values()[i];
  return make_node(x.shape(), std::move(v), {x, y}, [](TensorNode& node) {
    for (int p = 0; p < 2; ++p) {
      TensorNode& parent = *node.parents[static_cast<size_t>(p)];
      if (!parent.requires_grad) continue;
      parent.ensure_grad();
      for (size_t i = 0; i < node.grad.size(); ++i) parent.grad[i] += node.grad[i];
    }
  });
}

Tensor mul(const Tensor& x, const Tensor& y) {
  if (x.shape() != y.shape())
    raise(ErrorKind::ShapeMismatch,
          "mul: " + shape_str(x.shape()) + " vs " + shape_str(y.shape()));
  std::vector<Real> v(x.numel());
  for (size_t i = 0; i < v.size(); ++i) v[i] = x.values()[i] * y.values()[i];
  return make_node(x.shape(), std::move(v), {x, y}, [](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    TensorNode& py = *node.parents[1];
    if (px.requires_grad) {
      px.ensure_grad();
      for (size_t i = 0; i < node.grad.size(); ++i) px.grad[i] += node.grad[i] * py.values[i];
    }
    if (py.requires_grad) {
      py.ensure_grad();
      for (size_t i = 0; i < node.grad.size(); ++i) py.grad[i] += node.grad[i] * px.values[i];
    }
  });
}

Tensor add_const(const Tensor& x, Real c) {
  std::vector<Real> v(x.numel());
  for (size_t i = 0; i < v.size(); ++i) v[i] = x.values()[i] + c;
  return make_node(x.shape(), std::move(v), {x}, [](TensorNode& node) {
    TensorNode& p = *node.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (size_t i = 0; i < node.grad.size(); ++i) p.grad[i] += node.grad[i];
  });
}

Tensor sub_const(const Tensor& x, std::span<const Real> c) {
  if (c.size() != x.numel())
    raise(ErrorKind::ShapeMismatch, "sub_const: constant length " + std::to_string(c.size()) +
                                        " vs tensor " + shape_str(x.shape()));
  std::vector<Real> v(x.numel());
  for (size_t i = 0; i < v.size(); ++i) v[i] = x.values()[i] - c[i];
  return make_node(x.shape(), std::move(v), {x}, [](TensorNode& node) {
    TensorNode& p = *node.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (size_t i = 0; i < node.grad.size(); ++i) p.grad[i] += node.grad[i];
  });
}

Tensor mul_rowvec(const Tensor& x, const Tensor& v) {
  require_matrix(x, "mul_rowvec input");
  const size_t r = x.shape()[0], c = x.shape()[1];
  require_vector(v, c, "mul_rowvec vector");
  std::vector<Real> y(x.numel());
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) y[i * c + j] = x.values()[i * c + j] * v.values()[j];
  return make_node(x.shape(), std::move(y), {x, v}, [r, c](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    TensorNode& pv = *node.parents[1];
    if (px.requires_grad) {
      px.ensure_grad();
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) px.grad[i * c + j] += node.grad[i * c + j] * pv.values[j];
    }
    if (pv.requires_grad) {
      pv.ensure_grad();
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) pv.grad[j] += node.grad[i * c + j] * px.values[i * c + j];
    }
  });
}

Tensor mul_scalar(const Tensor& x, const Tensor& s) {
  if (s.numel() != 1) raise(ErrorKind::NotScalar, "mul_scalar factor must hold one element");
  const Real f = s.values()[0];
  std::vector<Real> y(x.numel());
  for (size_t i = 0; i < y.size(); ++i) y[i] = x.values()[i] * f;
  return make_node(x.shape(), std::move(y), {x, s}, [f](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    TensorNode& ps = *node.parents[1];
    if (px.requires_grad) {
      px.ensure_grad();
      for (size_t i = 0; i < node.grad.size(); ++i) px.grad[i] += node.grad[i] * f;
    }
    if (ps.requires_grad) {
      ps.ensure_grad();
      for (size_t i = 0; i < node.grad.size(); ++i) ps.grad[0] += node.grad[i] * px.values[i];
    }
  });
}

namespace {

Tensor elementwise(const Tensor& x, std::vector<Real> y, std::vector<Real> dydx) {
  return make_node(x.shape(), std::move(y), {x}, [d = std::move(dydx)](TensorNode& node) {
    TensorNode& p = *node.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (size_t i = 0; i < node.grad.size(); ++i) p.grad[i] += node.grad[i] * d[i];
  });
}

}  // namespace

Tensor relu(const Tensor& x) {
  std::vector<Real> y(x.numel()), d(x.numel());
  for (size_t i = 0; i < y.size(); ++i) {
    const Real v = x.values()[i];
    y[i] = v > 0 ? v : Real(0);
    d[i] = v > 0 ? Real(1) : Real(0);
  }
  return elementwise(x, std::move(y), std::move(d));
}

Tensor gelu(const Tensor& x) {
  constexpr Real kInvSqrt2 = Real(0.7071067811865475244L);
  constexpr Real kInvSqrt2Pi = Real(0.3989422804014326779L);
  std::vector<Real> y(x.numel()), d(x.numel());
  for (size_t i = 0; i < y.size(); ++i) {
    const Real v = x.values()[i];
    const Real cdf = Real(0.5) * std::erfc(-v * kInvSqrt2);
    const Real pdf = kInvSqrt2Pi * std::exp(Real(-0.5) * v * v);
    y[i] = v * cdf;
    d[i] = cdf + v * pdf;
  }
  return elementwise(x, std::move(y), std::move(d));
}

Tensor sigmoid(const Tensor& x) {
  std::vector<Real> y(x.numel()), d(x.numel());
  for (size_t i = 0; i < y.size(); ++i) {
    const Real v = x.values()[i];
    Real s;
    if (v >= 0) {
      s = Real(1) / (Real(1) + std::exp(-v));
    } else {
      const Real e = std::exp(v);
      s = e / (Real(1) + e);
    }
    y[i] = s;
    d[i] = s * (Real(1) - s);
  }
  return elementwise(x, std::move(y), std::move(d));
}

Tensor abs(const Tensor& x) {
  std::vector<Real> y(x.numel()), d(x.numel());
  for (size_t i = 0; i < y.size(); ++i) {
    const Real v = x.values()[i];
    y[i] = v < 0 ? -v : v;
    d[i] = v > 0 ? Real(1) : (v < 0 ? Real(-1) : Real(0));
  }
  return elementwise(x, std::move(y), std::move(d));
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real eps) {
  require_matrix(x, "layer_norm input");
  const size_t r = x.shape()[0], c = x.shape()[1];
  require_vector(gamma, c, "layer_norm gamma");
  require_vector(beta, c, "layer_norm beta");
  if (c == 0) raise(ErrorKind::ShapeMismatch, "layer_norm over zero columns");

  std::vector<Real> xhat(r * c), inv(r), y(r * c);
  for (size_t i = 0; i < r; ++i) {
    const Real* row = x.values().data() + i * c;
    Real mean = 0;
    for (size_t j = 0; j < c; ++j) mean += row[j];
    mean /= static_cast<Real>(c);
    Real var = 0;
    for (size_t j = 0; j < c; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<Real>(c);
    inv[i] = Real(1) / std::sqrt(var + eps);
    for (size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (row[j] - mean) * inv[i];
      y[i * c + j] = xhat[i * c + j] * gamma.values()[j] + beta.values()[j];
    }
  }

  return make_node({r, c}, std::move(y), {x, gamma, beta},
                   [r, c, xhat = std::move(xhat), inv = std::move(inv)](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    TensorNode& pg = *node.parents[1];
    TensorNode& pb = *node.parents[2];
    const Real* g = node.grad.data();
    if (pg.requires_grad) {
      pg.ensure_grad();
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) pg.grad[j] += g[i * c + j] * xhat[i * c + j];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) pb.grad[j] += g[i * c + j];
    }
    if (px.requires_grad) {
      px.ensure_grad();
      for (size_t i = 0; i < r; ++i) {
        Real mean_d = 0, mean_dx = 0;
        for (size_t j = 0; j < c; ++j) {
          const Real dxhat = g[i * c + j] * pg.values[j];
          mean_d += dxhat;
          mean_dx += dxhat * xhat[i * c + j];
        }
        mean_d /= static_cast<Real>(c);
        mean_dx /= static_cast<Real>(c);
        for (size_t j = 0; j < c; ++j) {
          const Real dxhat = g[i * c + j] * pg.values[j];
          px.grad[i * c + j] += inv[i] * (dxhat - mean_d - xhat[i * c + j] * mean_dx);
        }
      }
    }
  });
}

Tensor graph_standardize(const Tensor& x, const Segments& segments, Real eps) {
  require_matrix(x, "graph_standardize input");
  const size_t n = x.shape()[0], c = x.shape()[1];
  segments.check(n);

  const int64_t graphs = segments.num_graphs();
  std::vector<Real> y(n * c), xhat(n * c), inv(static_cast<size_t>(graphs) * c);
  for (int64_t gidx = 0; gidx < graphs; ++gidx) {
    const size_t lo = static_cast<size_t>(segments.offsets[static_cast<size_t>(gidx)]);
    const size_t hi = static_cast<size_t>(segments.offsets[static_cast<size_t>(gidx) + 1]);
    if (lo == hi) continue;
    const Real count = static_cast<Real>(hi - lo);
    for (size_t j = 0; j < c; ++j) {
      Real mean = 0;
      for (size_t i = lo; i < hi; ++i) mean += x.values()[i * c + j];
      mean /= count;
      Real var = 0;
      for (size_t i = lo; i < hi; ++i) {
        const Real d = x.values()[i * c + j] - mean;
        var += d * d;
      }
      var /= count;
      const Real iv = Real(1) / std::sqrt(var + eps);
      inv[static_cast<size_t>(gidx) * c + j] = iv;
      for (size_t i = lo; i < hi; ++i) {
        xhat[i * c + j] = (x.values()[i * c + j] - mean) * iv;
        y[i * c + j] = xhat[i * c + j];
      }
    }
  }

  return make_node({n, c}, std::move(y),
                   {x}, [c, segs = segments.offsets, xhat = std::move(xhat),
                         inv = std::move(inv)](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    if (!px.requires_grad) return;
    px.ensure_grad();
    const Real* g = node.grad.data();
    for (size_t gidx = 0; gidx + 1 < segs.size(); ++gidx) {
      const size_t lo = static_cast<size_t>(segs[gidx]);
      const size_t hi = static_cast<size_t>(segs[gidx + 1]);
      if (lo == hi) continue;
      const Real count = static_cast<Real>(hi - lo);
      for (size_t j = 0; j < c; ++j) {
        Real mean_g = 0, mean_gx = 0;
        for (size_t i = lo; i < hi; ++i) {
          mean_g += g[i * c + j];
          mean_gx += g[i * c + j] * xhat[i * c + j];
        }
        mean_g /= count;
        mean_gx /= count;
        const Real iv = inv[gidx * c + j];
        for (size_t i = lo; i < hi; ++i)
          px.grad[i * c + j] += iv * (g[i * c + j] - mean_g - xhat[i * c + j] * mean_gx);
      }
    }
  });
}

Tensor segment_scale_shift(const Tensor& x, const Tensor& scale, const Tensor& shift,
                           const Segments& segments) {
  require_matrix(x, "segment_scale_shift input");
  require_matrix(scale, "segment_scale_shift scale");
  require_matrix(shift, "segment_scale_shift shift");
  const size_t n = x.shape()[0], c = x.shape()[1];
  segments.check(n);
  const size_t graphs = static_cast<size_t>(segments.num_graphs());
  if (scale.shape()[0] != graphs || scale.shape()[1] != c || shift.shape() != scale.shape())
    raise(ErrorKind::ShapeMismatch, "segment_scale_shift: per-graph maps must be [graphs, cols]");

  std::vector<Real> y(n * c);
  for (size_t gidx = 0; gidx < graphs; ++gidx) {
    const size_t lo = static_cast<size_t>(segments.offsets[gidx]);
    const size_t hi = static_cast<size_t>(segments.offsets[gidx + 1]);
    for (size_t i = lo; i < hi; ++i)
      for (size_t j = 0; j < c; ++j)
        y[i * c + j] = x.values()[i * c + j] * scale.values()[gidx * c + j] +
                       shift.values()[gidx * c + j];
  }

  return make_node({n, c}, std::move(y), {x, scale, shift},
                   [c, segs = segments.offsets](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    TensorNode& pscale = *node.parents[1];
    TensorNode& pshift = *node.parents[2];
    const Real* g = node.grad.data();
    if (px.requires_grad) px.ensure_grad();
    if (pscale.requires_grad) pscale.ensure_grad();
    if (pshift.requires_grad) pshift.ensure_grad();
    for (size_t gidx = 0; gidx + 1 < segs.size(); ++gidx) {
      const size_t lo = static_cast<size_t>(segs[gidx]);
      const size_t hi = static_cast<size_t>(segs[gidx + 1]);
      for (size_t i = lo; i < hi; ++i) {
        for (size_t j = 0; j < c; ++j) {
          if (px.requires_grad) px.grad[i * c + j] += g[i * c + j] * pscale.values[gidx * c + j];
          if (pscale.requires_grad)
            pscale.grad[gidx * c + j] += g[i * c + j] * px.values[i * c + j];
          if (pshift.requires_grad) pshift.grad[gidx * c + j] += g[i * c + j];
        }
      }
    }
  });
}

namespace {

Tensor scatter_impl(const Tensor& x, const std::vector<int32_t>& src,
                    const std::vector<int32_t>& dst, std::vector<Real> coeff, const char* what) {
  require_matrix(x, what);
  const size_t n = x.shape()[0], c = x.shape()[1];
  check_edges(src, dst, 1, coeff.size(), n, what);

  std::vector<Real> y(n * c, Real(0));
  for (size_t e = 0; e < src.size(); ++e) {
    const Real* row = x.values().data() + static_cast<size_t>(src[e]) * c;
    Real* out = y.data() + static_cast<size_t>(dst[e]) * c;
    const Real w = coeff[e];
    for (size_t j = 0; j < c; ++j) out[j] += w * row[j];
  }

  return make_node({n, c}, std::move(y), {x},
                   [c, src, dst, coeff = std::move(coeff)](TensorNode& node) {
    TensorNode& px = *node.parents[0];
    if (!px.requires_grad) return;
    px.ensure_grad();
    const Real* g = node.grad.data();
    for (size_t e = 0; e < src.size(); ++e) {
      Real* target = px.grad.data() + static_cast<size_t>(src[e]) * c;
      const Real* grow = g + static_cast<size_t>(dst[e]) * c;
      const Real w = coeff[e];
      for (size_t j = 0; j < c; ++j) target[j] += w * grow[j];
    }
  });
}

}  // namespace

Tensor signed_scatter_mean(const Tensor& x, const std::vector<int32_t>& src,
                           const std::vector<int32_t>& dst, const std::vector<Real>& sign) {
  require_matrix(x, "signed_scatter_mean");
  const size_t n = x.shape()[0];
  check_edges(src, dst, 1, sign.size(), n, "signed_scatter_mean");

  std::vector<Real> indeg(n, Real(0));
  for (int32_t v : dst) indeg[static_cast<size_t>(v)] += Real(1);
  std::vector<Real> coeff(src.size());
  for (size_t e = 0; e < src.size(); ++e)
    coeff[e] = sign[e] / indeg[static_cast<size_t>(dst[e])];
  return scatter_impl(x, src, dst, std::move(coeff), "signed_scatter_mean");
}

Tensor scatter_sum(const Tensor& x, const std::vector<int32_t>& src,
                   const std::vector<int32_t>& dst) {
  return scatter_impl(x, src, dst, std::vector<Real>(src.size(), Real(1)), "scatter_sum");
}

Tensor scatter_weighted_sum(const Tensor& x, const std::vector<int32_t>& src,
                            const std::vector<int32_t>& dst, const std::vector<Real>& weight) {
  return scatter_impl(x, src, dst, weight, "scatter_weighted_sum");
}

Tensor dropout(const Tensor& x, double rate, bool training, uint64_t seed) {
  if (rate < 0.0 || rate >= 1.0)
    raise(ErrorKind::InvalidParams, "dropout rate must lie in [0, 1)");
  if (!training || rate == 0.0) {
    std::vector<Real> y = x.values();
    return make_node(x.shape(), std::move(y), {x}, [](TensorNode& node) {
      TensorNode& p = *node.parents[0];
      if (!p.requires_grad) return;
      p.ensure_grad();
      for (size_t i = 0; i < node.grad.size(); ++i) p.grad[i] += node.grad[i];
    });
  }

  SplitMix64 rng(seed);
  const Real keep_scale = Real(1.0 / (1.0 - rate));
  std::vector<Real> mask(x.numel());
  for (Real& m : mask) m = rng.next_double() >= rate ? keep_scale : Real(0);
  std::vector<Real> y(x.numel());
  for (size_t i = 0; i < y.size(); ++i) y[i] = x.values()[i] * mask[i];
  return elementwise(x, std::move(y), std::move(mask));
}

Tensor concat_rows(const std::vector<Tensor>& xs) {
  if (xs.empty()) raise(ErrorKind::ShapeMismatch, "concat_rows of nothing");
  const size_t r = xs[0].shape().empty() ? 0 : xs[0].shape()[0];
  size_t total = 0;
  for (const Tensor& t : xs) {
    require_matrix(t, "concat_rows input");
    if (t.shape()[0] != r)
      raise(ErrorKind::ShapeMismatch, "concat_rows: row counts differ");
    total += t.shape()[1];
  }

  std::vector<Real> y(r * total);
  std::vector<size_t> widths;
  size_t off = 0;
  for (const Tensor& t : xs) {
    const size_t c = t.shape()[1];
    widths.push_back(c);
    for (size_t i = 0; i < r; ++i)
      std::copy(t.values().begin() + i * c, t.values().begin() + (i + 1) * c,
                y.begin() + i * total + off);
    off += c;
  }

  std::vector<Tensor> parents(xs.begin(), xs.end());
  return make_node({r, total}, std::move(y), std::move(parents),
                   [r, total, widths = std::move(widths)](TensorNode& node) {
    size_t off = 0;
    for (size_t k = 0; k < node.parents.size(); ++k) {
      TensorNode& p = *node.parents[k];
      const size_t c = widths[k];
      if (p.requires_grad) {
        p.ensure_grad();
        for (size_t i = 0; i < r; ++i)
          for (size_t j = 0; j < c; ++j) p.grad[i * c + j] += node.grad[i * total + off + j];
      }
      off += c;
    }
  });
}

Tensor pair_cosine_distance(const Tensor& z,
                            const std::vector<std::pair<int32_t, int32_t>>& pairs) {
  require_matrix(z, "pair_cosine_distance");
  const size_t n = z.shape()[0], c = z.shape()[1];
  constexpr Real kMinNorm = Real(1e-12);

  std::vector<Real> norms(n, Real(-1));
  auto norm_of = [&](int32_t v) {
    if (v < 0 || static_cast<size_t>(v) >= n)
      raise(ErrorKind::IndexOutOfRange, "pair references node " + std::to_string(v));
    Real& cached = norms[static_cast<size_t>(v)];
    if (cached < 0) {
      Real acc = 0;
      const Real* row = z.values().data() + static_cast<size_t>(v) * c;
      for (size_t j = 0; j < c; ++j) acc += row[j] * row[j];
      cached = std::sqrt(acc);
    }
    if (cached < kMinNorm)
      raise(ErrorKind::ZeroEmbedding, "node " + std::to_string(v) +
                                          " has a zero embedding; cosine distance is undefined");
    return cached;
  };

  std::vector<Real> y(pairs.size()), cos_cache(pairs.size());
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const Real ni = norm_of(i), nj = norm_of(j);
    const Real* zi = z.values().data() + static_cast<size_t>(i) * c;
    const Real* zj = z.values().data() + static_cast<size_t>(j) * c;
    Real dot = 0;
    for (size_t k = 0; k < c; ++k) dot += zi[k] * zj[k];
    const Real cosv = dot / (ni * nj);
    cos_cache[p] = cosv;
    y[p] = Real(1) - cosv;
  }

  return make_node({pairs.size()}, std::move(y), {z},
                   [c, pairs, norms = std::move(norms),
                    cos_cache = std::move(cos_cache)](TensorNode& node) {
    TensorNode& pz = *node.parents[0];
    if (!pz.requires_grad) return;
    pz.ensure_grad();
    for (size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      const Real g = node.grad[p];
      if (g == Real(0)) continue;
      const Real ni = norms[static_cast<size_t>(i)], nj = norms[static_cast<size_t>(j)];
      const Real cosv = cos_cache[p];
      const Real* zi = pz.values.data() + static_cast<size_t>(i) * c;
      const Real* zj = pz.values.data() + static_cast<size_t>(j) * c;
      Real* gi = pz.grad.data() + static_cast<size_t>(i) * c;
      Real* gj = pz.grad.data() + static_cast<size_t>(j) * c;
      // d(1 - cos)/dz_i = -(z_j/(ni nj) - cos z_i/ni^2)
      for (size_t k = 0; k < c; ++k) {
        gi[k] += -g * (zj[k] / (ni * nj) - cosv * zi[k] / (ni * ni));
        gj[k] += -g * (zi[k] / (ni * nj) - cosv * zj[k] / (nj * nj));
      }
    }
  });
}

Tensor zero_norm_t(const Tensor& x) {
  const size_t n = x.numel();
  if (n < 2)
    raise(ErrorKind::TooFewValues, "zero_norm needs at least two values, got " +
                                       std::to_string(n));
  Real mean = 0;
  for (Real v : x.values()) mean += v;
  mean /= static_cast<Real>(n);
  Real var = 0;
  for (Real v : x.values()) var += (v - mean) * (v - mean);
  const Real sd = std::sqrt(var / static_cast<Real>(n));
  const bool degenerate = sd < Real(1e-12);

  std::vector<Real> y(n);
  for (size_t i = 0; i < n; ++i)
    y[i] = degenerate ? x.values()[i] - mean : (x.values()[i] - mean) / sd;

  std::vector<Real> out = y;  // copy: the lambda steals y, argument order is unspecified
  return make_node(x.shape(), std::move(out), {x},
                   [n, sd, degenerate, y = std::move(y)](TensorNode& node) {
    TensorNode& p = *node.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    Real mean_g = 0, mean_gy = 0;
    for (size_t i = 0; i < n; ++i) {
      mean_g += node.grad[i];
      mean_gy += node.grad[i] * y[i];
    }
    mean_g /= static_cast<Real>(n);
    mean_gy /= static_cast<Real>(n);
    for (size_t i = 0; i < n; ++i) {
      if (degenerate)
        p.grad[i] += node.grad[i] - mean_g;
      else
        p.grad[i] += (node.grad[i] - mean_g - y[i] * mean_gy) / sd;
    }
  });
}

Tensor mean_all(const Tensor& x) {
  const size_t n = x.numel();
  if (n == 0) raise(ErrorKind::ShapeMismatch, "mean of an empty tensor");
  Real acc = 0;
  for (Real v : x.values()) acc += v;
  return make_node({1}, {acc / static_cast<Real>(n)}, {x}, [n](TensorNode& node) {
    TensorNode& p = *node.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    const Real g = node.grad[0] / static_cast<Real>(n);
    for (size_t i = 0; i < n; ++i) p.grad[i] += g;
  });
}

Tensor sum_all(const Tensor& x) {
  Real acc = 0;
  for (Real v : x.values()) acc += v;
  return make_node({1}, {acc}, {x}, [](TensorNode& node) {
    TensorNode& p = *node.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (size_t i = 0; i < p.grad.size(); ++i) p.grad[i] += node.grad[0];
  });
}

void backward(const Tensor& loss) {
  TensorNode* root = loss.node();
  if (root == nullptr || root->numel() != 1)
    raise(ErrorKind::NotScalar, "backward expects a scalar loss");
  if (root->backward_started)
    raise(ErrorKind::DoubleBackward,
          "backward was already run from this loss; rebuild the graph first");
  root->backward_started = true;
  if (!root->requires_grad) return;

  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited{root};
  std::vector<std::pair<TensorNode*, size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      TensorNode* parent = node->parents[idx].get();
      ++idx;
      if (parent->requires_grad && visited.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->ensure_grad();
  root->grad[0] += Real(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (node->backprop) {
      node->ensure_grad();
      node->backprop(*node);
    }
  }
}

// ---- ParamStore -------------------------------------------------------------

Tensor& ParamStore::add(const std::string& name, Tensor t) {
  if (map_.count(name)) raise(ErrorKind::InvalidParams, "duplicate parameter '" + name + "'");
  order_.push_back(name);
  return map_.emplace(name, std::move(t)).first->second;
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = map_.find(name);
  if (it == map_.end()) raise(ErrorKind::InvalidParams, "unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = map_.find(name);
  if (it == map_.end()) raise(ErrorKind::InvalidParams, "unknown parameter '" + name + "'");
  return it->second;
}

size_t ParamStore::total_parameters() const {
  size_t total = 0;
  for (const auto& name : order_) total += map_.at(name).numel();
  return total;
}

void ParamStore::zero_grads() {
  for (const auto& name : order_) map_.find(name)->second.zero_grad();
}

ParamStore ParamStore::clone() const {
  ParamStore out;
  for (const auto& name : order_) {
    const Tensor& t = map_.at(name);
    out.add(name, Tensor::from_values(t.shape(), t.values(), t.requires_grad()));
  }
  return out;
}

}  // namespace funcgnn
