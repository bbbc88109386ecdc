#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keycast/rational.hpp"

namespace keycast {

// Node and edge ids are strings. Their "ascending" order everywhere in this
// library is declaration order in the instance, not lexicographic order.

struct Edge {
  std::string id;
  std::string tail;
  std::string head;
  Rational capacity{1};  // bits per channel use
};

enum class SourceRole { kMessage, kRandom, kBoth };

std::string_view to_string(SourceRole role);
SourceRole parse_source_role(std::string_view text);

inline bool holds_messages(SourceRole role) {
  return role == SourceRole::kMessage || role == SourceRole::kBoth;
}

struct SourceDecl {
  std::string node;
  SourceRole role = SourceRole::kBoth;
};

// An eavesdropper view: the messages on `edges` plus every generated bit of
// each node in `observed_sources`.
struct EavesdropSet {
  std::vector<std::string> edges;
  std::vector<std::string> observed_sources;
};

struct NetworkInstance {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<SourceDecl> sources;
  std::vector<std::string> terminals;
  std::vector<EavesdropSet> eavesdrop_sets;

  std::optional<int> find_node(std::string_view id) const;
  std::optional<int> find_edge(std::string_view id) const;
  // Position in `sources`, not in `nodes`.
  std::optional<int> find_source(std::string_view node) const;

  int node_index(std::string_view id) const;  // throws UNKNOWN_NODE
  int edge_index(std::string_view id) const;  // throws INVALID_INSTANCE

  // Edge indices in ascending (declaration) order.
  std::vector<int> in_edges(std::string_view node) const;
  std::vector<int> out_edges(std::string_view node) const;
};

struct Violation {
  std::string code;  // ACYCLICITY, DANGLING_REF, BAD_CAPACITY, DUPLICATE_ID, EMPTY_EAVESDROP_SET
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  // Informational only, e.g. TERMINAL_IS_SOURCE.
  std::vector<Violation> notes;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const NetworkInstance& instance);

// Throws INVALID_INSTANCE (or CYCLIC when acyclicity is the only problem).
void require_valid(const NetworkInstance& instance);

// Kahn's algorithm; among ready nodes the one declared first goes first.
// Throws CYCLIC.
std::vector<std::string> topological_order(const NetworkInstance& instance);

// Max-flow value from a super-source feeding every node of `source_set`
// without limit, to `sink`. Exact rational arithmetic.
Rational min_cut(const NetworkInstance& instance, const std::vector<std::string>& source_set,
                 std::string_view sink);

}  // namespace keycast
