#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "keycast/code.hpp"
#include "keycast/instance.hpp"

namespace keycast {

// A bijection on {0,1}^bits, stored as its table.
struct Permutation {
  int bits = 0;
  std::vector<std::uint64_t> table;

  std::uint64_t operator()(std::uint64_t m) const { return table[m]; }
  bool is_bijection() const;
};

// Canonical pre-encoding for a uniform key map f with k output bits: key
// values ascending, each preimage list ascending, and the inputs with k-bit
// prefix p sent to the p-th preimage list indexed by their suffix. Then
// f(pi(m)) = prefix_k(m). Throws NOT_UNIFORM.
Permutation preencoding_permutation(const KeyMap& f, int key_bits);

// Replaces the bits of `source` by pi(bits) before any function reads them.
NetworkCode preencode_source(const NetworkInstance& instance, const NetworkCode& code,
                             std::string_view source, const Permutation& pi);

// preencode_source on the only source. Throws MULTI_SOURCE.
NetworkCode apply_preencoding(const NetworkInstance& instance, const NetworkCode& code,
                              const Permutation& pi);

struct ColumnReduction {
  Gf2Matrix matrix;
  std::vector<int> kept;  // surviving nonzero columns, ascending
};

// Repeatedly zeroes the highest-index nonzero column that lies in the span of
// the other nonzero columns, until the nonzero columns are independent.
ColumnReduction zero_redundant_columns(const Gf2Matrix& a);

struct SecureCode {
  NetworkCode code;
  std::vector<Coord> message_coords;
};

// For B = {} and a linear code with a full-rank k x l key matrix: drops the
// redundant source bits, keeps the k surviving ones as the message, and
// re-targets the decoders through the inverse of the surviving k x k block.
// Throws NONZERO_B, NOT_LINEAR, RANK_DEFICIENT.
SecureCode linear_key_to_secure(const NetworkInstance& instance, const NetworkCode& code);

inline constexpr std::string_view kKeyTerminal = "d_key";
inline constexpr std::string_view kKeyEdge = "e_key";

// Adds terminal d_key fed only by the message source s through an edge of
// capacity R; sources, roles, and eavesdrop sets are unchanged.
// Throws MULTI_MESSAGE_SOURCE, BAD_RATE.
NetworkInstance reduce_secure_to_key(const NetworkInstance& secure, const Rational& rate);

// The original secure instance of a reduced one.
NetworkInstance strip_key_terminal(const NetworkInstance& reduced);

// Same code on the reduced instance, with the message bits sent on e_key and
// read back verbatim at d_key. Throws CAPACITY_EXCEEDED when the key does not
// fit into R * n bits.
NetworkCode lift_secure_code(const NetworkInstance& secure, const NetworkCode& code,
                             const std::vector<Coord>& message_coords, const Rational& rate);

// Inverse direction: requires H(K | bits of s) = 0, pre-encodes at s so the
// key becomes the first k bits of s, and drops d_key.
// Throws KEY_NOT_SOURCE_FUNCTION.
SecureCode restrict_key_code_to_secure(const NetworkInstance& reduced, const NetworkCode& key_code);

}  // namespace keycast
