#include <limits>
#include <queue>

#include "keycast/error.hpp"
#include "keycast/instance.hpp"

namespace keycast {

namespace {

// Residual network for Edmonds-Karp. Arcs come in forward/backward pairs
// (arc ^ 1 is the reverse). Unbounded arcs model the super-source links.
class ResidualNetwork {
 public:
  explicit ResidualNetwork(int nodes) : adjacency_(nodes) {}

  void add_arc(int from, int to, Rational capacity, bool unbounded = false) {
    adjacency_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, capacity, unbounded});
    adjacency_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, Rational(0), false});
  }

  Rational max_flow(int source, int sink) {
    Rational total(0);
    const int n = static_cast<int>(adjacency_.size());
    for (;;) {
      std::vector<int> parent_arc(n, -1);
      std::vector<bool> seen(n, false);
      std::queue<int> frontier;
      frontier.push(source);
      seen[source] = true;
      while (!frontier.empty() && !seen[sink]) {
        const int v = frontier.front();
        frontier.pop();
        for (int a : adjacency_[v]) {
          const Arc& arc = arcs_[a];
          if (seen[arc.to] || !has_residual(arc)) continue;
          seen[arc.to] = true;
          parent_arc[arc.to] = a;
          frontier.push(arc.to);
        }
      }
      if (!seen[sink]) return total;

      bool bounded = false;
      Rational bottleneck(0);
      for (int v = sink; v != source; v = arcs_[parent_arc[v] ^ 1].to) {
        const Arc& arc = arcs_[parent_arc[v]];
        if (arc.unbounded) continue;
        if (!bounded || arc.residual < bottleneck) bottleneck = arc.residual;
        bounded = true;
      }
      // Every s-t path crosses at least one real edge, since the super-source
      // only links to source nodes and sink is never among them.
      for (int v = sink; v != source; v = arcs_[parent_arc[v] ^ 1].to) {
        Arc& arc = arcs_[parent_arc[v]];
        if (!arc.unbounded) arc.residual -= bottleneck;
        arcs_[parent_arc[v] ^ 1].residual += bottleneck;
      }
      total += bottleneck;
    }
  }

 private:
  struct Arc {
    int to;
    Rational residual;
    bool unbounded;
  };

  static bool has_residual(const Arc& arc) { return arc.unbounded || arc.residual > 0; }

  std::vector<std::vector<int>> adjacency_;
  std::vector<Arc> arcs_;
};

}  // namespace

Rational min_cut(const NetworkInstance& instance, const std::vector<std::string>& source_set,
                 std::string_view sink) {
  const int n = static_cast<int>(instance.nodes.size());
  const int sink_index = instance.node_index(sink);
  ResidualNetwork network(n + 1);
  for (const Edge& e : instance.edges) {
    network.add_arc(instance.node_index(e.tail), instance.node_index(e.head), e.capacity);
  }
  const int super_source = n;
  for (const auto& s : source_set) {
    const int idx = instance.node_index(s);
    if (idx == sink_index) {
      fail(ErrorCode::kInvalidArgument, "sink '" + std::string(sink) + "' is in the source set");
    }
    network.add_arc(super_source, idx, Rational(0), /*unbounded=*/true);
  }
  return network.max_flow(super_source, sink_index);
}

}  // namespace keycast
