#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "keycast/gf2_matrix.hpp"

namespace keycast {

// Explicit function {0,1}^in_bits -> {0,1}^out_bits, indexed by the packed input.
class TruthTable {
 public:
  TruthTable() = default;
  TruthTable(int in_bits, int out_bits, std::vector<std::uint64_t> table);

  static TruthTable identity(int bits);
  static TruthTable constant(int in_bits, int out_bits, std::uint64_t value);

  int in_bits() const { return in_bits_; }
  int out_bits() const { return out_bits_; }
  const std::vector<std::uint64_t>& table() const { return table_; }

  std::uint64_t operator()(std::uint64_t input) const { return table_[input]; }

  bool operator==(const TruthTable& other) const = default;

 private:
  int in_bits_ = 0;
  int out_bits_ = 0;
  std::vector<std::uint64_t> table_ = {0};
};

// Largest input width a truth table may be materialized for.
inline constexpr int kMaxTableInputBits = 24;

// An edge encoder, decoder, or key map: a truth table or a GF(2) matrix.
class EdgeFunction {
 public:
  EdgeFunction() = default;
  EdgeFunction(TruthTable table) : repr_(std::move(table)) {}  // NOLINT
  EdgeFunction(Gf2Matrix matrix) : repr_(std::move(matrix)) {}  // NOLINT

  int in_bits() const;
  int out_bits() const;
  bool is_linear() const { return std::holds_alternative<Gf2Matrix>(repr_); }

  const TruthTable* as_table() const { return std::get_if<TruthTable>(&repr_); }
  const Gf2Matrix* as_matrix() const { return std::get_if<Gf2Matrix>(&repr_); }

  std::uint64_t apply(std::uint64_t input) const;

  // Materialize as a truth table. Throws SPACE_LIMIT beyond kMaxTableInputBits.
  TruthTable to_table() const;

  bool operator==(const EdgeFunction& other) const = default;

 private:
  std::variant<TruthTable, Gf2Matrix> repr_;
};

inline std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

}  // namespace keycast
