#include "keycast/evaluate.hpp"

#include <bit>

#include "keycast/error.hpp"

namespace keycast {

std::uint64_t CompiledCode::Kernel::apply(std::uint64_t x) const {
  if (!linear) return table[x];
  std::uint64_t y = 0;
  for (std::uint64_t mask : masks) y = (y << 1) | (std::popcount(x & mask) & 1u);
  return y;
}

CompiledCode::Kernel CompiledCode::make_kernel(const EdgeFunction& fn) {
  Kernel k;
  if (const auto* m = fn.as_matrix()) {
    k.linear = true;
    k.masks = m->packed_row_masks();
  } else {
    k.table = fn.as_table()->table();
  }
  return k;
}

CompiledCode::CompiledCode(const NetworkInstance& instance, const NetworkCode& code)
    : layout_(instance, code) {
  require_valid(instance);
  validate_code(instance, code);

  const int node_count = static_cast<int>(instance.nodes.size());
  for (const Edge& e : instance.edges) edge_widths_.push_back(keycast::edge_width(e, code.blocklength));

  node_fields_.resize(node_count);
  node_widths_.assign(node_count, 0);
  for (int v = 0; v < node_count; ++v) {
    const std::string& name = instance.nodes[v];
    for (int e : instance.in_edges(name)) {
      node_fields_[v].push_back({true, e, edge_widths_[e]});
      node_widths_[v] += edge_widths_[e];
    }
    for (std::size_t s = 0; s < layout_.slots().size(); ++s) {
      const SourceSlot& slot = layout_.slots()[s];
      if (slot.node == name && slot.width > 0) {
        node_fields_[v].push_back({false, static_cast<int>(s), slot.width});
        node_widths_[v] += slot.width;
      }
    }
  }

  const std::vector<std::string> order = topological_order(instance);
  for (const std::string& node : order) {
    const int v = instance.node_index(node);
    for (int e : instance.out_edges(node)) {
      steps_.push_back({e, v, make_kernel(code.edge_encoders.at(instance.edges[e].id))});
    }
  }
  for (const std::string& d : instance.terminals) {
    terminal_nodes_.push_back(instance.node_index(d));
    decoders_.push_back(make_kernel(code.decoders.at(d)));
  }
  key_ = make_kernel(code.key);
  key_bits_ = code.key.out_bits();
}

std::uint64_t CompiledCode::gather(std::span<const Field> fields, std::uint64_t m,
                                   std::span<const std::uint64_t> messages) const {
  std::uint64_t x = 0;
  for (const Field& f : fields) {
    const std::uint64_t part = f.from_edge ? messages[f.index] : layout_.source_value(m, f.index);
    x = (x << f.width) | part;
  }
  return x;
}

void CompiledCode::run(std::uint64_t m, std::span<std::uint64_t> messages) const {
  for (const Step& step : steps_) {
    messages[step.edge] = step.kernel.apply(gather(node_fields_[step.tail], m, messages));
  }
}

std::uint64_t CompiledCode::node_input(int node, std::uint64_t m,
                                       std::span<const std::uint64_t> messages) const {
  return gather(node_fields_[node], m, messages);
}

int CompiledCode::node_input_width(int node) const { return node_widths_[node]; }

std::uint64_t CompiledCode::decoder_input(int terminal, std::uint64_t m,
                                          std::span<const std::uint64_t> messages) const {
  return gather(node_fields_[terminal_nodes_[terminal]], m, messages);
}

std::uint64_t CompiledCode::decoder_output(int terminal, std::uint64_t m,
                                           std::span<const std::uint64_t> messages) const {
  return decoders_[terminal].apply(decoder_input(terminal, m, messages));
}

EvaluationTrace evaluate(const NetworkInstance& instance, const NetworkCode& code,
                         std::uint64_t assignment) {
  const CompiledCode compiled(instance, code);
  if (compiled.total_bits() < 64 && (assignment >> compiled.total_bits()) != 0) {
    fail(ErrorCode::kWidthMismatch, "assignment has more than " +
                                        std::to_string(compiled.total_bits()) + " bits");
  }
  std::vector<std::uint64_t> messages(instance.edges.size());
  compiled.run(assignment, messages);

  EvaluationTrace trace;
  trace.assignment = assignment;
  for (std::size_t e = 0; e < instance.edges.size(); ++e) {
    trace.edge_messages[instance.edges[e].id] = messages[e];
  }
  for (std::size_t j = 0; j < instance.terminals.size(); ++j) {
    trace.decoder_outputs[instance.terminals[j]] =
        compiled.decoder_output(static_cast<int>(j), assignment, messages);
  }
  trace.key_value = compiled.key(assignment);
  return trace;
}

TruthTable global_key_map(const NetworkInstance& instance, const NetworkCode& code,
                          int enumeration_cap) {
  const AssignmentLayout layout(instance, code);
  if (layout.total_bits() > enumeration_cap || layout.total_bits() > kMaxTableInputBits) {
    fail(ErrorCode::kSpaceLimit, "l = " + std::to_string(layout.total_bits()) +
                                     " exceeds the enumeration cap " + std::to_string(enumeration_cap));
  }
  if (code.key.in_bits() != layout.total_bits()) {
    fail(ErrorCode::kWidthMismatch, "key map reads " + std::to_string(code.key.in_bits()) +
                                        " bits but l = " + std::to_string(layout.total_bits()));
  }
  return code.key.to_table();
}

NetworkCode linear_to_general(const NetworkCode& code) {
  NetworkCode out = code;
  for (auto& [edge, fn] : out.edge_encoders) fn = fn.to_table();
  for (auto& [node, fn] : out.decoders) fn = fn.to_table();
  out.key = out.key.to_table();
  return out;
}

bool is_linear(const NetworkCode& code) {
  for (const auto& [edge, fn] : code.edge_encoders)
    if (!fn.is_linear()) return false;
  for (const auto& [node, fn] : code.decoders)
    if (!fn.is_linear()) return false;
  return code.key.is_linear();
}

}  // namespace keycast
