#include "keycast/constructions.hpp"

#include <string>

#include "keycast/error.hpp"

namespace keycast {

namespace {

std::string s(int i) { return "s" + std::to_string(i); }
std::string u(int i) { return "u" + std::to_string(i); }
std::string ubar(int i) { return "ubar" + std::to_string(i); }
std::string d(int i) { return "d" + std::to_string(i); }
std::string edge_id(const std::string& tail, const std::string& head) { return tail + "_" + head; }

Gf2Matrix all_ones(int rows, int cols) {
  Gf2Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.set(r, c, true);
  return m;
}

bool same_structure(const NetworkInstance& a, const NetworkInstance& b) {
  if (a.nodes != b.nodes || a.terminals != b.terminals) return false;
  if (a.edges.size() != b.edges.size() || a.sources.size() != b.sources.size()) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& x = a.edges[i];
    const Edge& y = b.edges[i];
    if (x.id != y.id || x.tail != y.tail || x.head != y.head || x.capacity != y.capacity) return false;
  }
  for (std::size_t i = 0; i < a.sources.size(); ++i)
    if (a.sources[i].node != b.sources[i].node) return false;
  if (a.eavesdrop_sets.size() != b.eavesdrop_sets.size()) return false;
  for (std::size_t i = 0; i < a.eavesdrop_sets.size(); ++i) {
    if (a.eavesdrop_sets[i].edges != b.eavesdrop_sets[i].edges ||
        a.eavesdrop_sets[i].observed_sources != b.eavesdrop_sets[i].observed_sources) {
      return false;
    }
  }
  return true;
}

int require_gap(const NetworkInstance& instance) {
  auto alpha = gap_alpha(instance);
  if (!alpha) fail(ErrorCode::kNotGapInstance, "instance is not a gap_instance output");
  return *alpha + 1;
}

}  // namespace

NetworkInstance gap_instance(int alpha, EavesdropMode mode) {
  if (alpha < 1) fail(ErrorCode::kBadAlpha, "alpha must be a positive integer, got " + std::to_string(alpha));
  const int r = alpha + 1;
  NetworkInstance g;
  for (int i = 1; i <= r; ++i) g.nodes.push_back(s(i));
  for (int i = 1; i <= r; ++i) g.nodes.push_back(u(i));
  for (int i = 1; i <= r; ++i) g.nodes.push_back(ubar(i));
  for (int i = 1; i <= r; ++i) g.nodes.push_back(d(i));

  auto add_edge = [&](const std::string& tail, const std::string& head) {
    g.edges.push_back({edge_id(tail, head), tail, head, Rational(1)});
  };
  for (int i = 1; i <= r; ++i) add_edge(s(i), u(i));
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j)
      if (j != i) add_edge(s(j), ubar(i));
  for (int i = 1; i <= r; ++i) {
    add_edge(u(i), d(i));
    add_edge(ubar(i), d(i));
  }

  for (int i = 1; i <= r; ++i) g.sources.push_back({s(i), SourceRole::kBoth});
  for (int i = 1; i <= r; ++i) g.terminals.push_back(d(i));

  auto in_set = [&](const std::string& node) {
    EavesdropSet set;
    for (int e : g.in_edges(node)) set.edges.push_back(g.edges[e].id);
    return set;
  };
  for (int i = 1; i <= r; ++i) g.eavesdrop_sets.push_back(in_set(u(i)));
  for (int i = 1; i <= r; ++i) g.eavesdrop_sets.push_back(in_set(ubar(i)));
  if (mode == EavesdropMode::kNodeAll) {
    for (int i = 1; i <= r; ++i) g.eavesdrop_sets.push_back({{}, {s(i)}});
  }
  return g;
}

std::optional<int> gap_alpha(const NetworkInstance& instance) {
  const int alpha = static_cast<int>(instance.sources.size()) - 1;
  if (alpha < 1) return std::nullopt;
  for (EavesdropMode mode : {EavesdropMode::kEdgeSets, EavesdropMode::kNodeAll}) {
    if (same_structure(instance, gap_instance(alpha, mode))) return alpha;
  }
  return std::nullopt;
}

NetworkCode sum_code(const NetworkInstance& gap) {
  const int r = require_gap(gap);
  NetworkCode code;
  code.blocklength = 1;
  for (int i = 1; i <= r; ++i) code.source_bits[s(i)] = 1;
  for (int i = 1; i <= r; ++i) {
    for (int e : gap.out_edges(s(i))) code.edge_encoders[gap.edges[e].id] = Gf2Matrix::identity(1);
    code.edge_encoders[edge_id(u(i), d(i))] = Gf2Matrix::identity(1);
    code.edge_encoders[edge_id(ubar(i), d(i))] = all_ones(1, r - 1);
    code.decoders[d(i)] = all_ones(1, 2);
  }
  code.key = all_ones(1, r);
  return code;
}

NetworkCode two_stage_gap_code(const NetworkInstance& gap) {
  const int r = require_gap(gap);
  if (r > 3) {
    fail(ErrorCode::kUnsupportedR, "ubar nodes receive " + std::to_string(r - 1) +
                                       " source bits but send only 2");
  }
  NetworkCode code;
  code.blocklength = 2;
  for (int i = 1; i <= r; ++i) code.source_bits[s(i)] = 1;

  Gf2Matrix repeat(2, 1);
  repeat.set(0, 0, true);
  repeat.set(1, 0, true);
  // ubar_i reads (b_j, b_j) for each j != i and keeps the first copy of each.
  Gf2Matrix pack(2, 2 * (r - 1));
  for (int t = 0; t < r - 1; ++t) pack.set(t, 2 * t, true);
  // d_i reads (b_i, b_i, packed others) and sums b_i with the packed bits.
  Gf2Matrix decode(1, 4);
  decode.set(0, 0, true);
  for (int t = 0; t < r - 1; ++t) decode.set(0, 2 + t, true);

  for (int i = 1; i <= r; ++i) {
    for (int e : gap.out_edges(s(i))) code.edge_encoders[gap.edges[e].id] = repeat;
    code.edge_encoders[edge_id(u(i), d(i))] = Gf2Matrix::identity(2);
    code.edge_encoders[edge_id(ubar(i), d(i))] = pack;
    code.decoders[d(i)] = decode;
  }
  code.key = all_ones(1, r);
  return code;
}

std::pair<NetworkInstance, NetworkCode> fig1b_instance_and_code() {
  NetworkInstance g;
  g.nodes = {"s1", "s2", "d"};
  g.edges = {{"s1_d", "s1", "d", Rational(1)}, {"s2_d", "s2", "d", Rational(1)}};
  g.sources = {{"s1", SourceRole::kBoth}, {"s2", SourceRole::kBoth}};
  g.terminals = {"d"};
  g.eavesdrop_sets = {{{}, {"s1"}}, {{}, {"s2"}}};

  NetworkCode code;
  code.blocklength = 1;
  code.source_bits = {{"s1", 1}, {"s2", 1}};
  code.edge_encoders["s1_d"] = Gf2Matrix::identity(1);
  code.edge_encoders["s2_d"] = Gf2Matrix::identity(1);
  code.decoders["d"] = all_ones(1, 2);
  code.key = all_ones(1, 2);
  return {std::move(g), std::move(code)};
}

}  // namespace keycast
