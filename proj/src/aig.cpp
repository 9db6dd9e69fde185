// Copyright 2026 The FuncGNN Authors
// SPDX-License-Identifier: Apache-2.0

#include "funcgnn/aig.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "funcgnn/error.hpp"
#include "funcgnn/rng.hpp"

namespace funcgnn {

namespace {

// Splits text into lines, tolerating trailing "\r" and a missing final newline.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<uint64_t> parse_fields(const std::string& line, size_t expected, const char* what) {
  std::istringstream in(line);
  std::vector<uint64_t> out;
  std::string tok;
  while (in >> tok) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      raise(ErrorKind::MalformedHeader, std::string(what) + ": expected unsigned integer, got '" +
                                            tok + "' in line '" + line + "'");
    out.push_back(value);
  }
  if (out.size() != expected)
    raise(ErrorKind::MalformedHeader, std::string(what) + ": expected " +
                                          std::to_string(expected) + " fields in line '" + line +
                                          "'");
  return out;
}

}  // namespace

Aig parse_aag(const std::string& text) {
  if (text.rfind("aig ", 0) == 0 || text.rfind("aig\n", 0) == 0)
    raise(ErrorKind::BinaryAigerUnsupported,
          "binary AIGER ('aig' header) is not supported; convert to ASCII 'aag' first");
  if (text.rfind("aag ", 0) != 0)
    raise(ErrorKind::MalformedHeader, "missing 'aag' header");

  std::vector<std::string> lines = split_lines(text);
  std::vector<uint64_t> h = parse_fields(lines[0].substr(4), 5, "header");
  const uint64_t m = h[0], i = h[1], l = h[2], o = h[3], a = h[4];

  if (l != 0)
    raise(ErrorKind::LatchesUnsupported,
          "sequential circuits are not supported (header declares " + std::to_string(l) +
              " latches)");
  if (m != i + a)
    raise(ErrorKind::MalformedHeader, "node indices must be contiguous: M (" + std::to_string(m) +
                                          ") != I + A (" + std::to_string(i + a) + ")");
  if (m > 0x7FFFFFFEULL)
    raise(ErrorKind::MalformedHeader, "circuit too large: M = " + std::to_string(m));

  const size_t needed = 1 + i + o + a;
  if (lines.size() < needed)
    raise(ErrorKind::MalformedHeader, "unexpected end of file: need " + std::to_string(needed) +
                                          " lines, got " + std::to_string(lines.size()));

  Aig aig;
  aig.num_inputs = static_cast<int32_t>(i);
  aig.num_ands = static_cast<int32_t>(a);
  aig.fanins.resize(a);

  size_t cursor = 1;
  for (uint64_t k = 0; k < i; ++k, ++cursor) {
    uint64_t lit = parse_fields(lines[cursor], 1, "input")[0];
    if (lit < 2)
      raise(ErrorKind::ConstantLiteralUnsupported,
            "input literal " + std::to_string(lit) + " refers to the constant node");
    if (lit % 2 != 0)
      raise(ErrorKind::MalformedHeader, "input literal " + std::to_string(lit) + " is inverted");
    if (lit != 2 * (k + 1))
      raise(ErrorKind::MalformedHeader, "input literal " + std::to_string(lit) +
                                            " out of order: expected " + std::to_string(2 * (k + 1)));
  }

  std::vector<uint64_t> output_lits(o);
  for (uint64_t k = 0; k < o; ++k, ++cursor) {
    uint64_t lit = parse_fields(lines[cursor], 1, "output")[0];
    if (lit < 2)
      raise(ErrorKind::ConstantLiteralUnsupported,
            "output literal " + std::to_string(lit) + " refers to the constant node");
    if (lit / 2 > m)
      raise(ErrorKind::DanglingLiteral,
            "output literal " + std::to_string(lit) + " references node beyond M");
    output_lits[k] = lit;
  }

  std::vector<bool> defined(a, false);
  for (uint64_t k = 0; k < a; ++k, ++cursor) {
    std::vector<uint64_t> f = parse_fields(lines[cursor], 3, "and");
    const uint64_t lhs = f[0];
    if (lhs % 2 != 0)
      raise(ErrorKind::MalformedHeader, "and literal " + std::to_string(lhs) + " is inverted");
    const uint64_t lhs_var = lhs / 2;
    if (lhs_var <= i || lhs_var > m)
      raise(ErrorKind::MalformedHeader,
            "and literal " + std::to_string(lhs) + " outside the gate index range");
    if (defined[lhs_var - i - 1])
      raise(ErrorKind::MalformedHeader, "and literal " + std::to_string(lhs) + " defined twice");
    defined[lhs_var - i - 1] = true;

    std::vector<Fanin> fanins;
    for (int side = 1; side <= 2; ++side) {
      const uint64_t rhs = f[side];
      if (rhs < 2)
        raise(ErrorKind::ConstantLiteralUnsupported,
              "fanin literal " + std::to_string(rhs) + " refers to the constant node");
      const uint64_t rhs_var = rhs / 2;
      if (rhs_var > m)
        raise(ErrorKind::DanglingLiteral,
              "fanin literal " + std::to_string(rhs) + " references node beyond M");
      if (rhs_var == lhs_var)
        raise(ErrorKind::CycleDetected, "gate literal " + std::to_string(lhs) + " feeds itself");
      if (rhs_var > lhs_var)
        raise(ErrorKind::DanglingLiteral, "fanin literal " + std::to_string(rhs) +
                                              " references a node not yet defined at literal " +
                                              std::to_string(lhs));
      fanins.push_back(Fanin{static_cast<int32_t>(rhs_var - 1), rhs % 2 ? int8_t{-1} : int8_t{1}});
    }
    aig.fanins[lhs_var - i - 1] = std::move(fanins);
  }

  aig.outputs.reserve(o);
  for (uint64_t lit : output_lits)
    aig.outputs.push_back(
        Fanin{static_cast<int32_t>(lit / 2 - 1), lit % 2 ? int8_t{-1} : int8_t{1}});

  aig.levels = topo_levels(aig);
  return aig;
}

Aig parse_aag_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_aag(buf.str());
}

std::string serialize_aag(const Aig& aig) {
  std::ostringstream out;
  out << "aag " << aig.num_nodes() << ' ' << aig.num_inputs << " 0 " << aig.outputs.size() << ' '
      << aig.num_ands << '\n';
  for (int32_t k = 0; k < aig.num_inputs; ++k) out << 2 * (k + 1) << '\n';
  for (const Fanin& o : aig.outputs)
    out << 2 * (o.src + 1) + (o.sign < 0 ? 1 : 0) << '\n';
  for (int32_t k = 0; k < aig.num_ands; ++k) {
    const int32_t v = aig.num_inputs + k;
    out << 2 * (v + 1);
    for (const Fanin& f : aig.fanins[static_cast<size_t>(k)])
      out << ' ' << 2 * (f.src + 1) + (f.sign < 0 ? 1 : 0);
    out << '\n';
  }
  return out.str();
}

void write_aag_file(const std::filesystem::path& path, const Aig& aig) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out << serialize_aag(aig);
}

std::vector<std::string> validate(const Aig& aig) {
  std::vector<std::string> violations;
  auto complain = [&](const std::string& msg) { violations.push_back(msg); };

  if (aig.num_inputs < 0 || aig.num_ands < 0) {
    complain("counts: negative node counts");
    return violations;
  }
  const int32_t n = aig.num_nodes();
  if (aig.fanins.size() != static_cast<size_t>(aig.num_ands))
    complain("counts: fanin table has " + std::to_string(aig.fanins.size()) + " entries for " +
             std::to_string(aig.num_ands) + " gates");

  bool ordered = true;
  const size_t gates = std::min(aig.fanins.size(), static_cast<size_t>(aig.num_ands));
  for (size_t k = 0; k < gates; ++k) {
    const int32_t v = aig.num_inputs + static_cast<int32_t>(k);
    const auto& fs = aig.fanins[k];
    if (fs.size() != 2)
      complain("fanin arity: gate " + std::to_string(v) + " has " + std::to_string(fs.size()) +
               " fanins");
    for (const Fanin& f : fs) {
      if (f.sign != 1 && f.sign != -1)
        complain("sign domain: gate " + std::to_string(v) + " fanin sign " +
                 std::to_string(int(f.sign)));
      if (f.src < 0 || f.src >= n) {
        complain("fanin range: gate " + std::to_string(v) + " references node " +
                 std::to_string(f.src));
        ordered = false;
      } else if (f.src >= v) {
        complain("fanin order: gate " + std::to_string(v) + " references node " +
                 std::to_string(f.src) + " that does not precede it");
        ordered = false;
      }
    }
  }

  for (const Fanin& o : aig.outputs) {
    if (o.src < 0 || o.src >= n)
      complain("output range: output references node " + std::to_string(o.src));
    if (o.sign != 1 && o.sign != -1)
      complain("sign domain: output sign " + std::to_string(int(o.sign)));
  }

  if (aig.levels.size() != static_cast<size_t>(n)) {
    complain("levels: expected " + std::to_string(n) + " entries, got " +
             std::to_string(aig.levels.size()));
  } else if (ordered && aig.fanins.size() == static_cast<size_t>(aig.num_ands)) {
    for (int32_t v = 0; v < n; ++v) {
      int32_t want = 0;
      if (aig.kind(v) == NodeKind::And) {
        for (const Fanin& f : aig.and_fanins(v))
          want = std::max(want, aig.levels[static_cast<size_t>(f.src)] + 1);
      }
      if (aig.levels[static_cast<size_t>(v)] != want) {
        complain("levels: node " + std::to_string(v) + " has level " +
                 std::to_string(aig.levels[static_cast<size_t>(v)]) + ", recurrence gives " +
                 std::to_string(want));
        break;
      }
    }
  }
  return violations;
}

std::vector<int32_t> topo_levels(const Aig& aig) {
  const int32_t n = aig.num_nodes();
  std::vector<int32_t> levels(static_cast<size_t>(n), 0);
  for (int32_t v = aig.num_inputs; v < n; ++v) {
    int32_t level = 0;
    for (const Fanin& f : aig.and_fanins(v)) {
      if (f.src < 0 || f.src >= v)
        raise(ErrorKind::CycleDetected, "gate " + std::to_string(v) +
                                            " depends on node " + std::to_string(f.src) +
                                            " that does not precede it");
      level = std::max(level, levels[static_cast<size_t>(f.src)] + 1);
    }
    levels[static_cast<size_t>(v)] = level;
  }
  return levels;
}

namespace {

std::pair<int64_t, int64_t> count_signs(const Aig& aig) {
  int64_t pos = 0, neg = 0;
  for (const auto& fs : aig.fanins)
    for (const Fanin& f : fs) (f.sign < 0 ? neg : pos) += 1;
  return {pos, neg};
}

}  // namespace

double gate_ratio(const Aig& aig) {
  auto [pos, neg] = count_signs(aig);
  if (neg == 0)
    raise(ErrorKind::NoNotEdges, "circuit has no inverted fanin; the ratio is unbounded");
  return static_cast<double>(pos) / static_cast<double>(neg);
}

double gate_ratio_or(const Aig& aig, double ceiling) {
  auto [pos, neg] = count_signs(aig);
  if (neg == 0) return ceiling;
  return std::min(ceiling, static_cast<double>(pos) / static_cast<double>(neg));
}

GraphTensors to_graph_tensors(const Aig& aig, bool add_self_loops, double ratio_ceiling) {
  std::vector<std::string> violations = validate(aig);
  if (!violations.empty())
    raise(ErrorKind::InvalidParams, "aig does not validate: " + violations.front());

  const int32_t n = aig.num_nodes();
  GraphTensors t;
  t.num_nodes = n;
  t.feature_dim = 2;
  t.features.assign(static_cast<size_t>(n) * 2, 0.0);
  for (int32_t v = 0; v < n; ++v)
    t.features[static_cast<size_t>(v) * 2 + (aig.kind(v) == NodeKind::And ? 1 : 0)] = 1.0;

  t.gate_ratio = gate_ratio_or(aig, ratio_ceiling);

  const size_t structural = static_cast<size_t>(aig.num_ands) * 2;
  t.edge_src.reserve(structural + (add_self_loops ? n : 0));
  t.edge_dst.reserve(t.edge_src.capacity());
  t.edge_sign.reserve(t.edge_src.capacity());
  for (int32_t v = aig.num_inputs; v < n; ++v) {
    for (const Fanin& f : aig.and_fanins(v)) {
      t.edge_src.push_back(f.src);
      t.edge_dst.push_back(v);
      t.edge_sign.push_back(static_cast<double>(f.sign));
    }
  }
  if (add_self_loops) {
    for (int32_t v = 0; v < n; ++v) {
      t.edge_src.push_back(v);
      t.edge_dst.push_back(v);
      t.edge_sign.push_back(1.0);
    }
  }
  return t;
}

Aig random_aig(uint64_t seed, int32_t n_inputs, int32_t n_ands, double invert_prob) {
  if (n_inputs < 1) raise(ErrorKind::InvalidParams, "random_aig needs at least one input");
  if (n_ands < 0) raise(ErrorKind::InvalidParams, "random_aig needs a non-negative gate count");
  if (!(invert_prob >= 0.0 && invert_prob <= 1.0))
    raise(ErrorKind::InvalidParams, "invert_prob must lie in [0, 1]");
  if (n_ands > 0 && n_inputs < 2)
    raise(ErrorKind::InvalidParams,
          "random_aig needs at least two inputs to draw distinct fanins for a gate");

  SplitMix64 rng(seed);
  Aig aig;
  aig.num_inputs = n_inputs;
  aig.num_ands = n_ands;
  aig.fanins.resize(static_cast<size_t>(n_ands));
  for (int32_t k = 0; k < n_ands; ++k) {
    const int32_t v = n_inputs + k;
    // Distinct unordered-free pair from [0, v): draw a, then b from the
    // remaining v - 1 candidates.
    int32_t fa = static_cast<int32_t>(rng.below(static_cast<uint64_t>(v)));
    int32_t fb = static_cast<int32_t>(rng.below(static_cast<uint64_t>(v) - 1));
    if (fb >= fa) fb += 1;
    int8_t sa = rng.bernoulli(invert_prob) ? int8_t{-1} : int8_t{1};
    int8_t sb = rng.bernoulli(invert_prob) ? int8_t{-1} : int8_t{1};
    aig.fanins[static_cast<size_t>(k)] = {Fanin{fa, sa}, Fanin{fb, sb}};
  }

  std::vector<bool> has_fanout(static_cast<size_t>(aig.num_nodes()), false);
  for (const auto& fs : aig.fanins)
    for (const Fanin& f : fs) has_fanout[static_cast<size_t>(f.src)] = true;
  for (int32_t v = 0; v < aig.num_nodes(); ++v)
    if (!has_fanout[static_cast<size_t>(v)]) aig.outputs.push_back(Fanin{v, 1});

  aig.levels = topo_levels(aig);
  return aig;
}

}  // namespace funcgnn
