#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keycast/code.hpp"
#include "keycast/evaluate.hpp"
#include "keycast/instance.hpp"

namespace keycast {

// A random variable that is a deterministic function of the uniform assignment m.
struct Variable {
  enum class Kind {
    kEdge,           // X_e
    kTerminalView,   // X_In(d), the packed decoder input
    kDecoderOutput,  // g_d(X_In(d))
    kKey,            // K = f(m)
    kSourceBit,      // b_ij
    kSourceBits,     // every bit of source s_i
  };

  Kind kind = Kind::kKey;
  std::string name;  // edge id, terminal, or source node
  int bit = 0;

  static Variable edge(std::string id) { return {Kind::kEdge, std::move(id), 0}; }
  static Variable terminal_view(std::string d) { return {Kind::kTerminalView, std::move(d), 0}; }
  static Variable decoder_output(std::string d) { return {Kind::kDecoderOutput, std::move(d), 0}; }
  static Variable key() { return {Kind::kKey, {}, 0}; }
  static Variable source_bit(std::string s, int j) { return {Kind::kSourceBit, std::move(s), j}; }
  static Variable source_bits(std::string s) { return {Kind::kSourceBits, std::move(s), 0}; }

  std::string label() const;
  bool operator==(const Variable&) const = default;
};

// Exact joint law of some variables: how many of the 2^l assignments produce
// each value tuple.
class CountTable {
 public:
  using Tuple = std::vector<std::uint64_t>;

  CountTable(std::vector<Variable> variables, std::vector<int> widths, std::uint64_t total,
             std::map<Tuple, std::uint64_t> counts);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<int>& widths() const { return widths_; }
  std::uint64_t total() const { return total_; }
  const std::map<Tuple, std::uint64_t>& counts() const { return counts_; }

  // Joint law of the selected variable positions, in the given order.
  CountTable marginal(std::span<const int> positions) const;

 private:
  std::vector<Variable> variables_;
  std::vector<int> widths_;
  std::uint64_t total_ = 0;
  std::map<Tuple, std::uint64_t> counts_;
};

// Enumerates all 2^l assignments; work is split across OpenMP threads and
// per-thread counts are summed. Throws SPACE_LIMIT when l > cap.
CountTable joint_counts(const NetworkInstance& instance, const NetworkCode& code,
                        const std::vector<Variable>& variables,
                        int enumeration_cap = kDefaultEnumerationCap);

// Several tables from a single enumeration pass.
std::vector<CountTable> joint_counts_many(const NetworkInstance& instance, const NetworkCode& code,
                                          const std::vector<std::vector<Variable>>& groups,
                                          int enumeration_cap = kDefaultEnumerationCap);

// Single-threaded reference for joint_counts_many.
std::vector<CountTable> joint_counts_many_serial(const NetworkInstance& instance,
                                                 const NetworkCode& code,
                                                 const std::vector<std::vector<Variable>>& groups,
                                                 int enumeration_cap = kDefaultEnumerationCap);

// First assignment m (ascending) whose variables take exactly `tuple`.
std::optional<std::uint64_t> first_assignment_with(const NetworkInstance& instance,
                                                   const NetworkCode& code,
                                                   const std::vector<Variable>& variables,
                                                   const CountTable::Tuple& tuple,
                                                   int enumeration_cap = kDefaultEnumerationCap);

// Exact predicates. Parts are variable positions within the table.
bool is_independent(const CountTable& table, std::span<const int> part_a, std::span<const int> part_b);
bool is_determined(const CountTable& table, std::span<const int> given, std::span<const int> target);
bool is_uniform(const CountTable& table, int position);

// Shannon quantities in bits, for reporting only.
double entropy_bits(const CountTable& table, std::span<const int> positions);
double conditional_entropy_bits(const CountTable& table, std::span<const int> target,
                                std::span<const int> given);
double mutual_information_bits(const CountTable& table, std::span<const int> part_a,
                               std::span<const int> part_b);

}  // namespace keycast
