#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keycast/analysis.hpp"
#include "keycast/code.hpp"
#include "keycast/evaluate.hpp"
#include "keycast/instance.hpp"
#include "keycast/rational.hpp"

namespace keycast {

enum class FeasibilityMode { kKey, kSec, kKey2 };

std::string_view to_string(FeasibilityMode mode);
FeasibilityMode parse_mode(std::string_view text);

inline constexpr int kDefaultWitnessSearchCap = 16;

struct Counterexample {
  std::optional<std::uint64_t> assignment;
  std::optional<int> eavesdrop_set;  // index into instance.eavesdrop_sets
  std::optional<std::string> terminal;
  std::string reason;
};

struct Verdict {
  bool applicable = false;
  bool ok = true;
  std::optional<Counterexample> counterexample;
};

// Advisory Shannon quantities; verdicts never read them.
struct Entropies {
  double key = 0;
  std::vector<double> leakage;          // I(K; view of beta), per eavesdrop set
  std::vector<double> equivocation;     // H(K | X_In(d)), per terminal
};

struct FeasibilityReport {
  FeasibilityMode mode = FeasibilityMode::kKey;
  Rational rate{0};
  int blocklength = 1;
  int key_bits = 0;    // R * n
  int total_bits = 0;  // l
  Verdict rate_ok;
  Verdict decoding_ok;
  Verdict secrecy_ok;
  Verdict witness_ok;
  std::vector<Coord> coords;  // message coords (sec) or M (key2)
  Entropies entropies;

  bool overall() const;
};

// (R, n)_key: uniform key of R*n bits, every decoder reproduces it, and the
// key is independent of every eavesdrop view.
FeasibilityReport check_key_feasibility(const NetworkInstance& instance, const NetworkCode& code,
                                        const Rational& rate,
                                        int enumeration_cap = kDefaultEnumerationCap);

// (R, n)_sec: as key mode, and the key map is exactly the projection onto
// `message_coords`, which must belong to message-holding sources.
FeasibilityReport check_secure_feasibility(const NetworkInstance& instance, const NetworkCode& code,
                                           const Rational& rate,
                                           const std::vector<Coord>& message_coords,
                                           int enumeration_cap = kDefaultEnumerationCap);

// (R, n)_key(2) with an explicit first-stage bit collection M.
FeasibilityReport check_two_stage_feasibility(const NetworkInstance& instance,
                                              const NetworkCode& code, const Rational& rate,
                                              const std::vector<Coord>& witness,
                                              int enumeration_cap = kDefaultEnumerationCap);

// Smallest M, then lexicographically first, for which the two-stage check passes.
std::optional<std::vector<Coord>> find_two_stage_witness(
    const NetworkInstance& instance, const NetworkCode& code, const Rational& rate,
    int witness_cap = kDefaultWitnessSearchCap);

// The eavesdropper's variables for one set: its edges, then observed sources.
std::vector<Variable> eavesdrop_view(const EavesdropSet& set);

}  // namespace keycast
