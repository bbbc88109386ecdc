#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "keycast/function.hpp"
#include "keycast/instance.hpp"

namespace keycast {

// Global key map: a function of all l source bits, k = out_bits() = R*n.
using KeyMap = EdgeFunction;

// One generated bit: bit `bit` (0-based, most significant first) of `source`.
struct Coord {
  std::string source;
  int bit = 0;

  auto operator<=>(const Coord&) const = default;
};

// A blocklength-n network code.
//
// Every function reads its node's packed input X_In(u): the messages of the
// incoming edges in ascending edge order, followed by the node's own ell_i
// bits when it is a source. The first field is the most significant.
// The global assignment m packs the sources' bits in declaration order, the
// first source most significant.
struct NetworkCode {
  int blocklength = 1;
  std::map<std::string, int> source_bits;
  std::map<std::string, EdgeFunction> edge_encoders;
  std::map<std::string, EdgeFunction> decoders;
  KeyMap key;
  // Optional annotation: the coords the key projects onto (secure codes).
  std::vector<Coord> message_coords;
};

struct SourceSlot {
  std::string node;
  int offset = 0;  // bits before this source in m, counted from the MSB
  int width = 0;
};

// Where each source's bits live inside the packed assignment m.
class AssignmentLayout {
 public:
  AssignmentLayout(const NetworkInstance& instance, const NetworkCode& code);

  int total_bits() const { return total_bits_; }
  const std::vector<SourceSlot>& slots() const { return slots_; }

  // Shift that brings `coord` to bit 0 of m. Throws BAD_COORDS.
  int shift_of(const Coord& coord) const;
  std::uint64_t bit(std::uint64_t m, const Coord& coord) const { return (m >> shift_of(coord)) & 1u; }
  // Pack the listed coords of m, first coord most significant.
  std::uint64_t project(std::uint64_t m, std::span<const Coord> coords) const;
  std::uint64_t source_value(std::uint64_t m, int slot) const;
  // Every coord, in assignment order.
  std::vector<Coord> all_coords() const;

 private:
  std::vector<SourceSlot> slots_;
  int total_bits_ = 0;
};

// Width in bits of the edge messages under blocklength n.
// Throws NONINTEGRAL_ALPHABET when c_e * n is not an integer.
int edge_width(const Edge& edge, int blocklength);

// Packed input width of X_In(node) under `code`.
int node_input_width(const NetworkInstance& instance, const NetworkCode& code,
                     std::string_view node);

// Checks every width invariant; throws WIDTH_MISMATCH / NONINTEGRAL_ALPHABET.
void validate_code(const NetworkInstance& instance, const NetworkCode& code);

std::string format_coords(std::span<const Coord> coords);
// "s1:0,s2:1"; empty text gives no coords.
std::vector<Coord> parse_coords(std::string_view text);

}  // namespace keycast
