#include "keycast/code.hpp"

#include <charconv>

#include "keycast/error.hpp"

namespace keycast {

AssignmentLayout::AssignmentLayout(const NetworkInstance& instance, const NetworkCode& code) {
  for (const auto& [node, bits] : code.source_bits) {
    if (!instance.find_source(node)) {
      fail(ErrorCode::kWidthMismatch, "source_bits names '" + node + "', which is not a source");
    }
    if (bits < 0) fail(ErrorCode::kWidthMismatch, "negative bit count for source '" + node + "'");
  }
  for (const SourceDecl& s : instance.sources) {
    auto it = code.source_bits.find(s.node);
    const int width = it == code.source_bits.end() ? 0 : it->second;
    slots_.push_back({s.node, total_bits_, width});
    total_bits_ += width;
  }
  if (total_bits_ > 63) {
    fail(ErrorCode::kSpaceLimit, "total source bits " + std::to_string(total_bits_) + " exceed 63");
  }
}

int AssignmentLayout::shift_of(const Coord& coord) const {
  for (const SourceSlot& slot : slots_) {
    if (slot.node != coord.source) continue;
    if (coord.bit < 0 || coord.bit >= slot.width) {
      fail(ErrorCode::kBadCoords, "bit " + std::to_string(coord.bit) + " out of range for source '" +
                                      coord.source + "' with " + std::to_string(slot.width) + " bits");
    }
    return total_bits_ - 1 - (slot.offset + coord.bit);
  }
  fail(ErrorCode::kBadCoords, "'" + coord.source + "' is not a source");
}

std::uint64_t AssignmentLayout::project(std::uint64_t m, std::span<const Coord> coords) const {
  std::uint64_t out = 0;
  for (const Coord& c : coords) out = (out << 1) | bit(m, c);
  return out;
}

std::uint64_t AssignmentLayout::source_value(std::uint64_t m, int slot) const {
  const SourceSlot& s = slots_[slot];
  return (m >> (total_bits_ - s.offset - s.width)) & low_mask(s.width);
}

std::vector<Coord> AssignmentLayout::all_coords() const {
  std::vector<Coord> coords;
  for (const SourceSlot& s : slots_)
    for (int j = 0; j < s.width; ++j) coords.push_back({s.node, j});
  return coords;
}

int edge_width(const Edge& edge, int blocklength) {
  std::int64_t bits = 0;
  if (!integral_product(edge.capacity, blocklength, bits)) {
    fail(ErrorCode::kNonintegralAlphabet,
         "edge '" + edge.id + "': capacity " + format_rational(edge.capacity) + " times n=" +
             std::to_string(blocklength) + " is not an integer");
  }
  if (bits > 63) fail(ErrorCode::kSpaceLimit, "edge '" + edge.id + "' carries more than 63 bits");
  return static_cast<int>(bits);
}

int node_input_width(const NetworkInstance& instance, const NetworkCode& code,
                     std::string_view node) {
  int width = 0;
  for (int e : instance.in_edges(node)) width += edge_width(instance.edges[e], code.blocklength);
  if (auto it = code.source_bits.find(std::string(node));
      it != code.source_bits.end() && instance.find_source(node)) {
    width += it->second;
  }
  return width;
}

void validate_code(const NetworkInstance& instance, const NetworkCode& code) {
  if (code.blocklength < 1) fail(ErrorCode::kWidthMismatch, "blocklength must be positive");
  const AssignmentLayout layout(instance, code);

  auto check = [](const EdgeFunction& fn, int in, int out, const std::string& what) {
    if (fn.in_bits() != in || fn.out_bits() != out) {
      fail(ErrorCode::kWidthMismatch,
           what + " is " + std::to_string(fn.in_bits()) + "->" + std::to_string(fn.out_bits()) +
               " bits, expected " + std::to_string(in) + "->" + std::to_string(out));
    }
    if (in > 63) fail(ErrorCode::kSpaceLimit, what + " reads more than 63 bits");
  };

  for (const Edge& e : instance.edges) {
    const int width = edge_width(e, code.blocklength);
    auto it = code.edge_encoders.find(e.id);
    if (it == code.edge_encoders.end()) {
      fail(ErrorCode::kWidthMismatch, "no encoder for edge '" + e.id + "'");
    }
    check(it->second, node_input_width(instance, code, e.tail), width, "encoder of '" + e.id + "'");
  }
  for (const auto& [edge, fn] : code.edge_encoders) {
    if (!instance.find_edge(edge)) fail(ErrorCode::kWidthMismatch, "encoder for unknown edge '" + edge + "'");
  }
  const int key_bits = code.key.out_bits();
  check(code.key, layout.total_bits(), key_bits, "key map");
  for (const auto& d : instance.terminals) {
    auto it = code.decoders.find(d);
    if (it == code.decoders.end()) fail(ErrorCode::kWidthMismatch, "no decoder for terminal '" + d + "'");
    check(it->second, node_input_width(instance, code, d), key_bits, "decoder of '" + d + "'");
  }
  for (const auto& [node, fn] : code.decoders) {
    bool is_terminal = false;
    for (const auto& d : instance.terminals) is_terminal = is_terminal || d == node;
    if (!is_terminal) fail(ErrorCode::kWidthMismatch, "decoder for non-terminal '" + node + "'");
  }
  for (const Coord& c : code.message_coords) layout.shift_of(c);
}

std::string format_coords(std::span<const Coord> coords) {
  std::string out;
  for (const Coord& c : coords) {
    if (!out.empty()) out += ',';
    out += c.source + ":" + std::to_string(c.bit);
  }
  return out;
}

std::vector<Coord> parse_coords(std::string_view text) {
  std::vector<Coord> coords;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      fail(ErrorCode::kParse, "coord '" + std::string(item) + "' is not SOURCE:BIT");
    }
    int bit = 0;
    const std::string_view digits = item.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bit);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      fail(ErrorCode::kParse, "coord '" + std::string(item) + "' has a bad bit index");
    }
    coords.push_back({std::string(item.substr(0, colon)), bit});
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return coords;
}

}  // namespace keycast
