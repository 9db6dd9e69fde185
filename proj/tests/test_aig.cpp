// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/aig.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "funcgnn/rng.hpp"
#include "helpers.hpp"

using namespace funcgnn;

namespace {

// Relabels gates into another valid topological order and permutes input
// ids, remapping fanins and outputs accordingly.
Aig relabel(const Aig& aig, uint64_t seed) {
  SplitMix64 rng(seed);
  const int32_t n = aig.num_nodes();

  std::vector<int32_t> new_id(static_cast<size_t>(n), -1);
  std::vector<int32_t> inputs(static_cast<size_t>(aig.num_inputs));
  std::iota(inputs.begin(), inputs.end(), 0);
  shuffle(inputs, rng);
  for (int32_t k = 0; k < aig.num_inputs; ++k) new_id[static_cast<size_t>(inputs[static_cast<size_t>(k)])] = k;

  // Kahn's algorithm with a random ready-queue pick.
  std::vector<int32_t> pending(static_cast<size_t>(aig.num_ands));
  for (int32_t k = 0; k < aig.num_ands; ++k) pending[static_cast<size_t>(k)] = aig.num_inputs + k;
  int32_t next = aig.num_inputs;
  while (!pending.empty()) {
    std::vector<size_t> ready;
    for (size_t p = 0; p < pending.size(); ++p) {
      const auto& fs = aig.and_fanins(pending[p]);
      if (std::all_of(fs.begin(), fs.end(),
                      [&](const Fanin& f) { return new_id[static_cast<size_t>(f.src)] >= 0; }))
        ready.push_back(p);
    }
    size_t pick = ready[static_cast<size_t>(rng.below(ready.size()))];
    new_id[static_cast<size_t>(pending[pick])] = next++;
    pending.erase(pending.begin() + static_cast<long>(pick));
  }

  Aig out;
  out.num_inputs = aig.num_inputs;
  out.num_ands = aig.num_ands;
  out.fanins.resize(static_cast<size_t>(aig.num_ands));
  for (int32_t v = aig.num_inputs; v < n; ++v) {
    std::vector<Fanin> fs = aig.and_fanins(v);
    for (Fanin& f : fs) f.src = new_id[static_cast<size_t>(f.src)];
    out.fanins[static_cast<size_t>(new_id[static_cast<size_t>(v)] - aig.num_inputs)] = std::move(fs);
  }
  for (Fanin o : aig.outputs) {
    o.src = new_id[static_cast<size_t>(o.src)];
    out.outputs.push_back(o);
  }
  out.levels = topo_levels(out);
  return out;
}

}  // namespace

TEST_CASE("aig: parses a passthrough circuit") {
  Aig aig = parse_aag("aag 1 1 0 1 0\n2\n2\n");
  CHECK(aig.num_inputs == 1);
  CHECK(aig.num_ands == 0);
  REQUIRE(aig.outputs.size() == 1);
  CHECK(aig.outputs[0].src == 0);
  CHECK(aig.outputs[0].sign == 1);
  CHECK(aig.levels == std::vector<int32_t>{0});
}

TEST_CASE("aig: decodes inversion bits into edge signs") {
  Aig aig = parse_aag("aag 3 2 0 1 1\n2\n4\n7\n6 3 4\n");
  CHECK(aig.num_inputs == 2);
  CHECK(aig.num_ands == 1);
  const auto& fs = aig.and_fanins(2);
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].src == 0);
  CHECK(fs[0].sign == -1);
  CHECK(fs[1].src == 1);
  CHECK(fs[1].sign == 1);
  REQUIRE(aig.outputs.size() == 1);
  CHECK(aig.outputs[0].src == 2);
  CHECK(aig.outputs[0].sign == -1);
}

TEST_CASE("aig: ignores symbol table and comments") {
  Aig aig = parse_aag("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\ni0 a\ni1 b\no0 y\nc\nnote\n");
  CHECK(aig.num_ands == 1);
  CHECK(aig.outputs[0].src == 2);
}

TEST_CASE("aig: serialize then parse is the identity") {
  const std::string text = "aag 3 2 0 1 1\n2\n4\n7\n6 3 4\n";
  CHECK(serialize_aag(parse_aag(text)) == text);

  for (uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    Aig a = random_aig(seed, 5, 40, 0.3);
    std::string s = serialize_aag(a);
    CHECK(serialize_aag(parse_aag(s)) == s);
  }
}

TEST_CASE("aig: rejects malformed inputs with precise kinds") {
  using test::thrown_kind;
  CHECK(thrown_kind([] { parse_aag("aag 2 1 0 1\n"); }) == ErrorKind::MalformedHeader);
  CHECK(thrown_kind([] { parse_aag("avg 1 1 0 1 0\n"); }) == ErrorKind::MalformedHeader);
  CHECK(thrown_kind([] { parse_aag("aag x 1 0 1 0\n"); }) == ErrorKind::MalformedHeader);
  CHECK(thrown_kind([] { parse_aag("aag 5 2 0 1 1\n2\n4\n6\n6 2 4\n"); }) ==
        ErrorKind::MalformedHeader);
  CHECK(thrown_kind([] { parse_aag("aag 2 1 1 0 0\n2\n4 2\n"); }) ==
        ErrorKind::LatchesUnsupported);
  CHECK(thrown_kind([] { parse_aag("aig 2 1 0 1 1\n"); }) == ErrorKind::BinaryAigerUnsupported);
  CHECK(thrown_kind([] { parse_aag("aag 1 1 0 1 0\n2\n0\n"); }) ==
        ErrorKind::ConstantLiteralUnsupported);
  CHECK(thrown_kind([] { parse_aag("aag 2 1 0 0 1\n2\n4 2 1\n"); }) ==
        ErrorKind::ConstantLiteralUnsupported);
  CHECK(thrown_kind([] { parse_aag("aag 2 1 0 0 1\n2\n4 2 6\n"); }) == ErrorKind::DanglingLiteral);
  CHECK(thrown_kind([] { parse_aag("aag 1 1 0 1 0\n2\n8\n"); }) == ErrorKind::DanglingLiteral);
  CHECK(thrown_kind([] { parse_aag("aag 2 1 0 0 1\n2\n4 4 2\n"); }) == ErrorKind::CycleDetected);
  CHECK(thrown_kind([] { parse_aag("aag 3 1 0 0 2\n2\n4 6 2\n6 2 2\n"); }) ==
        ErrorKind::DanglingLiteral);
  CHECK(thrown_kind([] { parse_aag("aag 2 1 0 0 1\n2\n"); }) == ErrorKind::MalformedHeader);
}

TEST_CASE("aig: validate reports structural violations") {
  Aig aig = parse_aag("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n");
  CHECK(validate(aig).empty());

  SUBCASE("fanin arity") {
    aig.fanins[0].pop_back();
    auto v = validate(aig);
    REQUIRE(!v.empty());
    CHECK(v[0].find("fanin arity") != std::string::npos);
  }
  SUBCASE("sign domain") {
    aig.fanins[0][0].sign = 0;
    auto v = validate(aig);
    REQUIRE(!v.empty());
    CHECK(v[0].find("sign domain") != std::string::npos);
  }
  SUBCASE("fanin order") {
    aig.fanins[0][0].src = 2;
    auto v = validate(aig);
    REQUIRE(!v.empty());
    CHECK(v[0].find("fanin order") != std::string::npos);
  }
  SUBCASE("levels recurrence") {
    aig.levels[2] = 7;
    auto v = validate(aig);
    REQUIRE(!v.empty());
    CHECK(v[0].find("levels") != std::string::npos);
  }
}

TEST_CASE("aig: levels follow the deepest fanin") {
  // Chain of three gates over four inputs.
  Aig aig = parse_aag("aag 7 4 0 1 3\n2\n4\n6\n8\n14\n10 2 4\n12 10 6\n14 12 8\n");
  CHECK(aig.levels == std::vector<int32_t>{0, 0, 0, 0, 1, 2, 3});
  CHECK(*std::max_element(aig.levels.begin(), aig.levels.end()) == 3);
}

TEST_CASE("aig: topo_levels rejects cyclic structures") {
  Aig aig = parse_aag("aag 3 2 0 0 1\n2\n4\n6 2 4\n");
  aig.fanins[0][0].src = 2;  // gate feeds itself
  CHECK(test::thrown_kind([&] { topo_levels(aig); }) == ErrorKind::CycleDetected);
}

TEST_CASE("aig: gate ratio counts fanin signs only") {
  // AND(a, NOT a): one positive, one negative fanin.
  Aig aig = parse_aag("aag 2 1 0 1 1\n2\n4\n4 2 3\n");
  CHECK(gate_ratio(aig) == 1.0);

  // Output inversions must not count.
  Aig inverted_out = parse_aag("aag 2 1 0 1 1\n2\n5\n4 2 3\n");
  CHECK(gate_ratio(inverted_out) == 1.0);
}

TEST_CASE("aig: gate ratio without NOT edges hits the ceiling") {
  Aig aig = parse_aag("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n");
  CHECK(test::thrown_kind([&] { gate_ratio(aig); }) == ErrorKind::NoNotEdges);
  CHECK(gate_ratio_or(aig) == kDefaultRatioCeiling);
  CHECK(gate_ratio_or(aig, 5.0) == 5.0);
  CHECK(to_graph_tensors(aig, true).gate_ratio == kDefaultRatioCeiling);
}

TEST_CASE("aig: gate ratio is invariant under relabeling") {
  for (uint64_t seed : {10u, 11u, 12u}) {
    Aig a = random_aig(seed, 6, 60, 0.35);
    double r = gate_ratio(a);
    for (uint64_t rl : {1u, 2u}) {
      Aig b = relabel(a, rl);
      CHECK(validate(b).empty());
      CHECK(gate_ratio(b) == r);
    }
  }
}

TEST_CASE("aig: graph tensors carry kinds, signs and self-loops") {
  Aig aig = parse_aag("aag 3 2 0 1 1\n2\n4\n7\n6 3 4\n");

  GraphTensors plain = to_graph_tensors(aig, false);
  CHECK(plain.num_nodes == 3);
  CHECK(plain.edge_src.size() == 2);  // 2 * num_ands
  CHECK(plain.features == std::vector<double>{1, 0, 1, 0, 0, 1});
  CHECK(plain.edge_src == std::vector<int32_t>{0, 1});
  CHECK(plain.edge_dst == std::vector<int32_t>{2, 2});
  CHECK(plain.edge_sign == std::vector<double>{-1, 1});
  CHECK(plain.gate_ratio == 1.0);

  GraphTensors looped = to_graph_tensors(aig, true);
  CHECK(looped.edge_src.size() == plain.edge_src.size() + 3);
  for (size_t e = 2; e < 5; ++e) {
    CHECK(looped.edge_src[e] == looped.edge_dst[e]);
    CHECK(looped.edge_sign[e] == 1.0);
  }
  CHECK(looped.gate_ratio == plain.gate_ratio);  // ratio predates the loops
}

TEST_CASE("aig: graph tensors require a well-formed circuit") {
  Aig aig = parse_aag("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n");
  aig.fanins[0].pop_back();
  CHECK(test::thrown_kind([&] { to_graph_tensors(aig, true); }) == ErrorKind::InvalidParams);
}

TEST_CASE("aig: random circuits are deterministic and well-formed") {
  Aig a = random_aig(123, 6, 80, 0.3);
  Aig b = random_aig(123, 6, 80, 0.3);
  CHECK(serialize_aag(a) == serialize_aag(b));
  CHECK(serialize_aag(a) != serialize_aag(random_aig(124, 6, 80, 0.3)));
  CHECK(validate(a).empty());

  std::vector<bool> has_fanout(static_cast<size_t>(a.num_nodes()), false);
  for (int32_t v = a.num_inputs; v < a.num_nodes(); ++v) {
    const auto& fs = a.and_fanins(v);
    REQUIRE(fs.size() == 2);
    CHECK(fs[0].src != fs[1].src);
    CHECK(fs[0].src < v);
    CHECK(fs[1].src < v);
    has_fanout[static_cast<size_t>(fs[0].src)] = true;
    has_fanout[static_cast<size_t>(fs[1].src)] = true;
  }
  for (const Fanin& o : a.outputs) {
    CHECK(!has_fanout[static_cast<size_t>(o.src)]);
    CHECK(o.sign == 1);
  }
  size_t fanout_free = 0;
  for (bool f : has_fanout) fanout_free += f ? 0 : 1;
  CHECK(a.outputs.size() == fanout_free);
}

TEST_CASE("aig: random circuit sign fraction tracks invert_prob") {
  Aig a = random_aig(7, 4, 50, 0.3);
  int64_t neg = 0;
  for (const auto& fs : a.fanins)
    for (const Fanin& f : fs) neg += f.sign < 0 ? 1 : 0;
  const double frac = static_cast<double>(neg) / 100.0;
  CHECK(frac >= 0.15);
  CHECK(frac <= 0.45);
}

TEST_CASE("aig: random circuit parameter validation") {
  using test::thrown_kind;
  CHECK(thrown_kind([] { random_aig(1, 0, 0, 0.5); }) == ErrorKind::InvalidParams);
  CHECK(thrown_kind([] { random_aig(1, 1, 1, 0.5); }) == ErrorKind::InvalidParams);
  CHECK(thrown_kind([] { random_aig(1, 2, -1, 0.5); }) == ErrorKind::InvalidParams);
  CHECK(thrown_kind([] { random_aig(1, 2, 1, 1.5); }) == ErrorKind::InvalidParams);
  CHECK(thrown_kind([] { random_aig(1, 2, 1, -0.1); }) == ErrorKind::InvalidParams);
  CHECK(random_aig(1, 1, 0, 0.5).num_nodes() == 1);  // no gates, one input is fine
}
