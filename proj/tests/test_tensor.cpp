// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/tensor.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"

using namespace funcgnn;
using funcgnn::test::thrown_kind;

namespace {

Tensor leaf(Shape shape, std::vector<Real> values) {
  return Tensor::from_values(std::move(shape), std::move(values), true);
}

}  // namespace

TEST_CASE("tensor: from_values rejects a shape the values cannot fill") {
  CHECK(thrown_kind([] { Tensor::from_values({2, 3}, {1, 2, 3}); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("tensor: affine computes x W + b") {
  Tensor x = leaf({2, 2}, {1, 2, 3, 4});
  Tensor W = leaf({2, 2}, {1, 0, 0, 1});
  Tensor b = leaf({2}, {1, 1});
  Tensor y = affine(x, W, b);
  CHECK(y.values() == std::vector<Real>{2, 3, 4, 5});
}

TEST_CASE("tensor: affine rejects mismatched inner dimensions") {
  Tensor x = leaf({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor W = leaf({2, 2}, {1, 0, 0, 1});
  Tensor b = leaf({2}, {0, 0});
  CHECK(thrown_kind([&] { affine(x, W, b); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("tensor: backward fills leaf gradients, here d(sum x*x)/dx = 2x") {
  Tensor x = leaf({3}, {1, -2, 3});
  Tensor loss = sum_all(mul(x, x));
  backward(loss);
  REQUIRE(x.has_grad());
  CHECK(x.grad()[0] == doctest::Approx(2.0));
  CHECK(x.grad()[1] == doctest::Approx(-4.0));
  CHECK(x.grad()[2] == doctest::Approx(6.0));
}

TEST_CASE("tensor: backward rejects non-scalar roots") {
  Tensor x = leaf({3}, {1, 2, 3});
  Tensor y = mul(x, x);
  CHECK(thrown_kind([&] { backward(y); }) == ErrorKind::NotScalar);
}

TEST_CASE("tensor: backward refuses to run twice from one root") {
  Tensor x = leaf({2}, {1, 2});
  Tensor loss = sum_all(x);
  backward(loss);
  CHECK(thrown_kind([&] { backward(loss); }) == ErrorKind::DoubleBackward);
}

TEST_CASE("tensor: gradients accumulate across two losses sharing a leaf") {
  Tensor x = leaf({2}, {1, 2});
  backward(sum_all(x));
  backward(sum_all(mul(x, x)));
  CHECK(x.grad()[0] == doctest::Approx(1.0 + 2.0));
  CHECK(x.grad()[1] == doctest::Approx(1.0 + 4.0));
}

TEST_CASE("tensor: elementwise fixtures") {
  Tensor x = leaf({4}, {-1, 0, 1, 2});
  CHECK(relu(x).values() == std::vector<Real>{0, 0, 1, 2});
  CHECK(abs(x).values() == std::vector<Real>{1, 0, 1, 2});
  CHECK(sigmoid(x).values()[1] == doctest::Approx(0.5));
  // 0.5 * (1 + erf(1/sqrt(2)))
  CHECK(gelu(x).values()[2] == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(add_const(x, Real(0.5)).values() == std::vector<Real>{-0.5, 0.5, 1.5, 2.5});
  std::vector<Real> c{1, 1, 1, 1};
  CHECK(sub_const(x, c).values() == std::vector<Real>{-2, -1, 0, 1});
}

TEST_CASE("tensor: mul_rowvec scales columns, mul_scalar scales everything") {
  Tensor x = leaf({2, 2}, {1, 2, 3, 4});
  Tensor v = leaf({2}, {10, 100});
  CHECK(mul_rowvec(x, v).values() == std::vector<Real>{10, 200, 30, 400});
  CHECK(mul_scalar(x, Tensor::scalar(2)).values() == std::vector<Real>{2, 4, 6, 8});
}

TEST_CASE("tensor: layer_norm standardizes each row before the affine map") {
  Tensor x = leaf({1, 3}, {1, 2, 3});
  Tensor gamma = leaf({3}, {1, 1, 1});
  Tensor beta = leaf({3}, {0, 0, 0});
  Tensor y = layer_norm(x, gamma, beta);
  const double sd = std::sqrt(2.0 / 3.0 + 1e-5);
  CHECK(y.values()[0] == doctest::Approx(-1.0 / sd).epsilon(1e-12));
  CHECK(y.values()[1] == doctest::Approx(0.0));
  CHECK(y.values()[2] == doctest::Approx(1.0 / sd).epsilon(1e-12));
}

TEST_CASE("tensor: graph_standardize zeroes each segment's column means") {
  Tensor x = leaf({5, 2}, {1, 10, 3, 30, 5, 50, 7, 70, 9, 90});
  Segments segs{{0, 2, 5}};
  Tensor y = graph_standardize(x, segs);
  for (size_t g = 0; g < 2; ++g) {
    const size_t lo = static_cast<size_t>(segs.offsets[g]);
    const size_t hi = static_cast<size_t>(segs.offsets[g + 1]);
    for (size_t j = 0; j < 2; ++j) {
      Real mean = 0;
      for (size_t i = lo; i < hi; ++i) mean += y.values()[i * 2 + j];
      mean /= static_cast<Real>(hi - lo);
      CHECK(std::abs(mean) <= 1e-9);
    }
  }
}

TEST_CASE("tensor: segment_scale_shift applies each graph's own affine row") {
  Tensor x = leaf({3, 2}, {1, 1, 1, 1, 1, 1});
  Tensor scale = leaf({2, 2}, {2, 3, 10, 20});
  Tensor shift = leaf({2, 2}, {0, 0, 1, 1});
  Segments segs{{0, 2, 3}};
  Tensor y = segment_scale_shift(x, scale, shift, segs);
  CHECK(y.values() == std::vector<Real>{2, 3, 2, 3, 11, 21});
}

TEST_CASE("tensor: signed_scatter_mean averages sign-weighted sources") {
  Tensor x = leaf({3, 2}, {1, 2, 3, 4, 0, 0});
  std::vector<int32_t> src{0, 1};
  std::vector<int32_t> dst{2, 2};
  std::vector<Real> sign{1, -1};
  Tensor y = signed_scatter_mean(x, src, dst, sign);
  CHECK(y.values()[0] == 0);  // no incoming edges
  CHECK(y.values()[2] == 0);
  CHECK(y.values()[4] == doctest::Approx((1.0 - 3.0) / 2));
  CHECK(y.values()[5] == doctest::Approx((2.0 - 4.0) / 2));
}

TEST_CASE("tensor: scatter_sum and scatter_weighted_sum fixtures") {
  Tensor x = leaf({3, 1}, {1, 10, 0});
  std::vector<int32_t> src{0, 1};
  std::vector<int32_t> dst{2, 2};
  CHECK(scatter_sum(x, src, dst).values()[2] == 11);
  std::vector<Real> w{0.5, 2.0};
  CHECK(scatter_weighted_sum(x, src, dst, w).values()[2] == doctest::Approx(20.5));
}

TEST_CASE("tensor: scatter indices out of range are rejected") {
  Tensor x = leaf({2, 1}, {1, 2});
  std::vector<int32_t> src{0}, dst{5};
  CHECK(thrown_kind([&] { scatter_sum(x, src, dst); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("tensor: dropout is the identity in evaluation mode and rate 0") {
  Tensor x = leaf({100}, std::vector<Real>(100, 1.5));
  CHECK(dropout(x, 0.5, false, 42).values() == x.values());
  CHECK(dropout(x, 0.0, true, 42).values() == x.values());
}

TEST_CASE("tensor: dropout keeps or scales, deterministically per seed") {
  Tensor x = leaf({1000}, std::vector<Real>(1000, 2.0));
  Tensor a = dropout(x, 0.25, true, 7);
  Tensor b = dropout(x, 0.25, true, 7);
  Tensor c = dropout(x, 0.25, true, 8);
  CHECK(a.values() == b.values());
  CHECK(a.values() != c.values());
  size_t kept = 0;
  for (Real v : a.values()) {
    const bool is_zero = v == 0;
    const bool is_scaled = std::abs(v - 2.0 / 0.75) < 1e-12;
    CHECK((is_zero || is_scaled));
    kept += is_scaled;
  }
  CHECK(kept > 650);
  CHECK(kept < 850);
}

TEST_CASE("tensor: dropout rejects rates outside [0, 1)") {
  Tensor x = leaf({1}, {1});
  CHECK(thrown_kind([&] { dropout(x, 1.0, true, 1); }) == ErrorKind::InvalidParams);
  CHECK(thrown_kind([&] { dropout(x, -0.1, true, 1); }) == ErrorKind::InvalidParams);
}

TEST_CASE("tensor: concat_rows lays blocks side by side") {
  Tensor a = leaf({2, 1}, {1, 2});
  Tensor b = leaf({2, 2}, {3, 4, 5, 6});
  Tensor y = concat_rows({a, b});
  CHECK(y.shape() == Shape{2, 3});
  CHECK(y.values() == std::vector<Real>{1, 3, 4, 2, 5, 6});
}

TEST_CASE("tensor: pair_cosine_distance on orthogonal and parallel rows") {
  Tensor z = leaf({3, 2}, {1, 0, 0, 1, 2, 0});
  std::vector<std::pair<int32_t, int32_t>> pairs{{0, 1}, {0, 2}};
  Tensor d = pair_cosine_distance(z, pairs);
  CHECK(d.values()[0] == doctest::Approx(1.0));
  CHECK(d.values()[1] == doctest::Approx(0.0));
}

TEST_CASE("tensor: pair_cosine_distance rejects zero rows") {
  Tensor z = leaf({2, 2}, {0, 0, 1, 0});
  std::vector<std::pair<int32_t, int32_t>> pairs{{0, 1}};
  CHECK(thrown_kind([&] { pair_cosine_distance(z, pairs); }) == ErrorKind::ZeroEmbedding);
}

TEST_CASE("tensor: zero_norm_t matches the frozen hand computation") {
  Tensor x = leaf({4}, {1, 2, 3, 4});
  Tensor y = zero_norm_t(x);
  CHECK(y.values()[0] == doctest::Approx(-1.3416407864998738).epsilon(1e-14));
  CHECK(y.values()[1] == doctest::Approx(-0.4472135954999579).epsilon(1e-14));
  CHECK(y.values()[2] == doctest::Approx(0.4472135954999579).epsilon(1e-14));
  CHECK(y.values()[3] == doctest::Approx(1.3416407864998738).epsilon(1e-14));
}

TEST_CASE("tensor: mean_all and sum_all reduce to scalars") {
  Tensor x = leaf({2, 2}, {1, 2, 3, 4});
  CHECK(sum_all(x).item() == 10);
  CHECK(mean_all(x).item() == doctest::Approx(2.5));
}

TEST_CASE("tensor: NoGradGuard suppresses graph recording") {
  Tensor x = leaf({2}, {1, 2});
  CHECK(grad_enabled());
  {
    NoGradGuard guard;
    CHECK(!grad_enabled());
    Tensor y = mul(x, x);
    CHECK(!y.requires_grad());
    {
      NoGradGuard nested;
      CHECK(!grad_enabled());
    }
    CHECK(!grad_enabled());
  }
  CHECK(grad_enabled());
  Tensor y = mul(x, x);
  CHECK(y.requires_grad());
}

TEST_CASE("tensor: ParamStore keeps insertion order and clones deeply") {
  ParamStore store;
  store.add("b", Tensor::from_values({2}, {1, 2}, true));
  store.add("a", Tensor::from_values({3}, {3, 4, 5}, true));
  CHECK(store.names() == std::vector<std::string>{"b", "a"});
  CHECK(store.total_parameters() == 5);
  CHECK(store.contains("a"));
  CHECK(!store.contains("z"));

  ParamStore copy = store.clone();
  copy.at("b").values()[0] = 99;
  CHECK(store.at("b").values()[0] == 1);
}
