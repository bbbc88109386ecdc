#pragma once

#include <optional>
#include <utility>

#include "keycast/code.hpp"
#include "keycast/instance.hpp"

namespace keycast {

enum class EavesdropMode {
  kEdgeSets,  // one set In(v) per middle-layer node v
  kNodeAll,   // additionally one set per source, observing all its bits
};

// Layered gap network with r = alpha + 1 sources s_i, middle nodes u_i and
// ubar_i, and terminals d_i: edges s_i->u_i, s_j->ubar_i (j != i), u_i->d_i,
// ubar_i->d_i, all of unit capacity. Throws BAD_ALPHA for alpha < 1.
NetworkInstance gap_instance(int alpha, EavesdropMode mode = EavesdropMode::kEdgeSets);

// alpha when `instance` is exactly gap_instance(alpha, mode) for some mode,
// ignoring source roles.
std::optional<int> gap_alpha(const NetworkInstance& instance);

// n = 1, one bit per source; every node forwards the XOR of what it receives
// and the key is the parity of all source bits. Throws NOT_GAP_INSTANCE.
NetworkCode sum_code(const NetworkInstance& gap);

// n = 2, one bit per source, one key bit. Sources repeat their bit, ubar_i
// packs the other sources' bits, and each terminal recovers every source bit
// before outputting their parity. Defined for r <= 3 (UNSUPPORTED_R otherwise).
NetworkCode two_stage_gap_code(const NetworkInstance& gap);

// Two one-bit sources wired straight into one terminal; the eavesdropper
// may observe either source. The code forwards both bits and keys on b1 xor b2.
std::pair<NetworkInstance, NetworkCode> fig1b_instance_and_code();

}  // namespace keycast
