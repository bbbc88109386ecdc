#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keycast/code.hpp"
#include "keycast/feasibility.hpp"
#include "keycast/instance.hpp"
#include "keycast/rational.hpp"

namespace keycast {

enum class EncoderFamily { kAllTables, kLinear };
enum class SourceBehavior { kForward, kFree };

inline constexpr std::uint64_t kDefaultSearchBudget = 10'000'000;
inline constexpr int kDefaultSearchCap = 12;

struct CodeShape {
  int blocklength = 1;
  // One entry per source in declaration order, or a single entry for all.
  std::vector<int> source_bits{1};
  EncoderFamily family = EncoderFamily::kAllTables;
  SourceBehavior sources = SourceBehavior::kForward;
  std::optional<int> max_key_bits;

  // Per-source bit counts for `instance`. Throws INVALID_ARGUMENT.
  std::vector<int> bits_for(const NetworkInstance& instance) const;
};

// "n=1,l=1:2,family=tables|linear,sources=forward|free,kmax=2"; omitted
// fields keep their defaults. Throws PARSE.
CodeShape parse_shape(std::string_view text);
std::string format_shape(const CodeShape& shape);

// Encoder candidates in lexicographic order of the concatenated encoder
// descriptions (truth tables entry by entry, or matrix rows), one digit per
// enumerated edge with the first edge most significant. Source edges are not
// enumerated under FORWARD. Each candidate carries the 0-bit key and 0-bit
// decoders, so it is a valid rate-0 code.
class CodeStream {
 public:
  CodeStream(const NetworkInstance& instance, const CodeShape& shape);
  ~CodeStream();
  CodeStream(CodeStream&&) noexcept;
  CodeStream& operator=(CodeStream&&) noexcept;

  // Number of candidates; nullopt when it does not fit in 64 bits.
  std::optional<std::uint64_t> size() const;
  std::uint64_t cursor() const { return cursor_; }
  void seek(std::uint64_t cursor) { cursor_ = cursor; }
  NetworkCode at(std::uint64_t index) const;
  std::optional<NetworkCode> next();

  struct Plan;
  const Plan& plan() const { return *plan_; }

 private:
  std::unique_ptr<Plan> plan_;
  std::uint64_t cursor_ = 0;
};

// Throws BUDGET_EXCEEDED when the stream is longer than `budget`.
CodeStream enumerate_codes(const NetworkInstance& instance, const CodeShape& shape,
                           std::uint64_t budget = kDefaultSearchBudget);

struct SearchOptions {
  std::uint64_t budget = kDefaultSearchBudget;
  int enumeration_cap = kDefaultSearchCap;
  std::uint64_t cursor = 0;
  std::optional<std::uint64_t> limit;  // candidates to examine from cursor
  int jobs = 0;                        // 0: OpenMP default
};

struct SearchResult {
  FeasibilityMode mode = FeasibilityMode::kKey;
  Rational best_rate{0};
  int key_bits = 0;
  std::optional<NetworkCode> witness;
  std::vector<Coord> witness_coords;  // message coords (sec) or M (key2)
  std::optional<std::uint64_t> witness_index;
  std::uint64_t candidates_examined = 0;
  std::uint64_t total_candidates = 0;
  std::uint64_t next_cursor = 0;
  bool exhaustive = false;
};

// Largest k = R*n reached by any candidate in [cursor, cursor + limit), with
// keys (key, key2) or message coords (sec) chosen per candidate; ties go to
// the first candidate in stream order. The witness is rebuilt and re-checked
// by the feasibility checker. Throws BUDGET_EXCEEDED, SPACE_LIMIT, and
// InternalError when the rebuilt witness fails.
SearchResult max_feasible_rate(const NetworkInstance& instance, FeasibilityMode mode,
                               const CodeShape& shape, const SearchOptions& options = {});

// Single-threaded reference without pruning; same result.
SearchResult max_feasible_rate_serial(const NetworkInstance& instance, FeasibilityMode mode,
                                      const CodeShape& shape, const SearchOptions& options = {});

}  // namespace keycast
