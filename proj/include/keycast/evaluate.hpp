#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "keycast/code.hpp"
#include "keycast/instance.hpp"

namespace keycast {

// Default cap on l for anything that enumerates all 2^l assignments.
inline constexpr int kDefaultEnumerationCap = 24;

struct EvaluationTrace {
  std::uint64_t assignment = 0;
  std::map<std::string, std::uint64_t> edge_messages;
  std::map<std::string, std::uint64_t> decoder_outputs;
  std::uint64_t key_value = 0;
};

// A code validated against its instance and flattened into index form for
// repeated evaluation. Immutable; safe to share between threads.
class CompiledCode {
 public:
  CompiledCode(const NetworkInstance& instance, const NetworkCode& code);

  const AssignmentLayout& layout() const { return layout_; }
  int total_bits() const { return layout_.total_bits(); }
  int key_bits() const { return key_bits_; }
  int edge_count() const { return static_cast<int>(edge_widths_.size()); }
  int edge_width(int edge) const { return edge_widths_[edge]; }
  int terminal_count() const { return static_cast<int>(decoders_.size()); }

  // Fills messages[e] for every edge, in topological order.
  void run(std::uint64_t m, std::span<std::uint64_t> messages) const;

  // X_In(node) packed; node is an index into instance.nodes.
  std::uint64_t node_input(int node, std::uint64_t m, std::span<const std::uint64_t> messages) const;
  int node_input_width(int node) const;

  // Terminal j in instance.terminals order.
  std::uint64_t decoder_input(int terminal, std::uint64_t m,
                              std::span<const std::uint64_t> messages) const;
  std::uint64_t decoder_output(int terminal, std::uint64_t m,
                               std::span<const std::uint64_t> messages) const;
  std::uint64_t key(std::uint64_t m) const { return key_.apply(m); }

 private:
  struct Field {
    bool from_edge;
    int index;  // edge index, or slot index in the layout
    int width;
  };
  struct Kernel {
    bool linear = false;
    std::vector<std::uint64_t> table;
    std::vector<std::uint64_t> masks;  // row masks when linear
    std::uint64_t apply(std::uint64_t x) const;
  };
  struct Step {
    int edge;
    int tail;
    Kernel kernel;
  };

  static Kernel make_kernel(const EdgeFunction& fn);
  std::uint64_t gather(std::span<const Field> fields, std::uint64_t m,
                       std::span<const std::uint64_t> messages) const;

  AssignmentLayout layout_;
  std::vector<int> edge_widths_;
  std::vector<std::vector<Field>> node_fields_;
  std::vector<int> node_widths_;
  std::vector<Step> steps_;
  std::vector<int> terminal_nodes_;
  std::vector<Kernel> decoders_;
  Kernel key_;
  int key_bits_ = 0;
};

EvaluationTrace evaluate(const NetworkInstance& instance, const NetworkCode& code,
                         std::uint64_t assignment);

// Materialized key map over all 2^l assignments. Throws SPACE_LIMIT when l > cap.
TruthTable global_key_map(const NetworkInstance& instance, const NetworkCode& code,
                          int enumeration_cap = kDefaultEnumerationCap);

// Replaces every GF(2) part with its truth table.
NetworkCode linear_to_general(const NetworkCode& code);

// True when every encoder, decoder, and the key are GF(2) matrices.
bool is_linear(const NetworkCode& code);

}  // namespace keycast
