#include "keycast/instance.hpp"

#include <functional>
#include <queue>
#include <set>
#include <unordered_map>

#include "keycast/error.hpp"

namespace keycast {

std::string_view to_string(SourceRole role) {
  switch (role) {
    case SourceRole::kMessage: return "message";
    case SourceRole::kRandom: return "random";
    case SourceRole::kBoth: return "both";
  }
  return "both";
}

SourceRole parse_source_role(std::string_view text) {
  if (text == "message") return SourceRole::kMessage;
  if (text == "random") return SourceRole::kRandom;
  if (text == "both") return SourceRole::kBoth;
  fail(ErrorCode::kParse, "unknown source role '" + std::string(text) + "'");
}

std::optional<int> NetworkInstance::find_node(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == id) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> NetworkInstance::find_edge(std::string_view id) const {
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> NetworkInstance::find_source(std::string_view node) const {
  for (std::size_t i = 0; i < sources.size(); ++i)
    if (sources[i].node == node) return static_cast<int>(i);
  return std::nullopt;
}

int NetworkInstance::node_index(std::string_view id) const {
  auto idx = find_node(id);
  if (!idx) fail(ErrorCode::kUnknownNode, "unknown node '" + std::string(id) + "'");
  return *idx;
}

int NetworkInstance::edge_index(std::string_view id) const {
  auto idx = find_edge(id);
  if (!idx) fail(ErrorCode::kInvalidInstance, "unknown edge '" + std::string(id) + "'");
  return *idx;
}

std::vector<int> NetworkInstance::in_edges(std::string_view node) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].head == node) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> NetworkInstance::out_edges(std::string_view node) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].tail == node) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// Kahn's algorithm over node indices. Returns fewer than |V| nodes on a cycle.
// Edges with dangling endpoints are ignored.
std::vector<int> kahn_order(const NetworkInstance& instance) {
  const int n = static_cast<int>(instance.nodes.size());
  std::unordered_map<std::string_view, int> index;
  for (int i = 0; i < n; ++i) index.emplace(instance.nodes[i], i);
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indegree(n, 0);
  for (const Edge& e : instance.edges) {
    auto t = index.find(e.tail);
    auto h = index.find(e.head);
    if (t == index.end() || h == index.end()) continue;
    succ[t->second].push_back(h->second);
    ++indegree[h->second];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : succ[v])
      if (--indegree[w] == 0) ready.push(w);
  }
  return order;
}

}  // namespace

ValidationReport validate(const NetworkInstance& instance) {
  ValidationReport report;
  auto violation = [&](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };

  std::set<std::string_view> node_ids;
  for (const auto& node : instance.nodes) {
    if (!node_ids.insert(node).second) violation("DUPLICATE_ID", "node '" + node + "' declared twice");
  }
  std::set<std::string_view> edge_ids;
  bool dangling_edge = false;
  for (const Edge& e : instance.edges) {
    if (!edge_ids.insert(e.id).second) violation("DUPLICATE_ID", "edge '" + e.id + "' declared twice");
    if (!node_ids.count(e.tail)) {
      violation("DANGLING_REF", "edge '" + e.id + "' tail '" + e.tail + "' is not a node");
      dangling_edge = true;
    }
    if (!node_ids.count(e.head)) {
      violation("DANGLING_REF", "edge '" + e.id + "' head '" + e.head + "' is not a node");
      dangling_edge = true;
    }
    if (e.capacity.numerator() <= 0 || e.capacity.denominator() <= 0) {
      violation("BAD_CAPACITY", "edge '" + e.id + "' capacity " + format_rational(e.capacity) +
                                    " is not a positive rational");
    }
    if (e.tail == e.head) violation("ACYCLICITY", "edge '" + e.id + "' is a self-loop");
  }

  std::set<std::string_view> source_ids;
  for (const SourceDecl& s : instance.sources) {
    if (!node_ids.count(s.node)) violation("DANGLING_REF", "source '" + s.node + "' is not a node");
    if (!source_ids.insert(s.node).second)
      violation("DUPLICATE_ID", "source '" + s.node + "' listed twice");
  }
  std::set<std::string_view> terminal_ids;
  for (const auto& d : instance.terminals) {
    if (!node_ids.count(d)) violation("DANGLING_REF", "terminal '" + d + "' is not a node");
    if (!terminal_ids.insert(d).second) violation("DUPLICATE_ID", "terminal '" + d + "' listed twice");
    if (source_ids.count(d)) {
      report.notes.push_back({"TERMINAL_IS_SOURCE", "terminal '" + d + "' is also a source"});
    }
  }

  for (std::size_t b = 0; b < instance.eavesdrop_sets.size(); ++b) {
    const EavesdropSet& set = instance.eavesdrop_sets[b];
    const std::string where = "eavesdrop set " + std::to_string(b);
    if (set.edges.empty() && set.observed_sources.empty()) {
      violation("EMPTY_EAVESDROP_SET", where + " observes nothing");
    }
    for (const auto& e : set.edges) {
      if (!edge_ids.count(e)) violation("DANGLING_REF", where + " names unknown edge '" + e + "'");
    }
    for (const auto& s : set.observed_sources) {
      if (!source_ids.count(s)) violation("DANGLING_REF", where + " observes non-source '" + s + "'");
    }
  }

  if (!dangling_edge && kahn_order(instance).size() != instance.nodes.size()) {
    violation("ACYCLICITY", "the directed graph contains a cycle");
  }
  return report;
}

void require_valid(const NetworkInstance& instance) {
  const ValidationReport report = validate(instance);
  if (report.ok()) return;
  bool only_cycles = true;
  for (const auto& v : report.violations) only_cycles = only_cycles && v.code == "ACYCLICITY";
  const auto& first = report.violations.front();
  fail(only_cycles ? ErrorCode::kCyclic : ErrorCode::kInvalidInstance,
       first.code + ": " + first.message);
}

std::vector<std::string> topological_order(const NetworkInstance& instance) {
  for (const Edge& e : instance.edges) {
    instance.node_index(e.tail);
    instance.node_index(e.head);
  }
  const std::vector<int> order = kahn_order(instance);
  if (order.size() != instance.nodes.size()) fail(ErrorCode::kCyclic, "no topological order exists");
  std::vector<std::string> names;
  names.reserve(order.size());
  for (int v : order) names.push_back(instance.nodes[v]);
  return names;
}

}  // namespace keycast
