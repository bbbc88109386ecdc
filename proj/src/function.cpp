#include "keycast/function.hpp"

#include <bit>
#include <string>
#include <type_traits>

#include "keycast/error.hpp"

namespace keycast {

TruthTable::TruthTable(int in_bits, int out_bits, std::vector<std::uint64_t> table)
    : in_bits_(in_bits), out_bits_(out_bits), table_(std::move(table)) {
  if (in_bits < 0 || in_bits > kMaxTableInputBits) {
    fail(ErrorCode::kSpaceLimit, "truth table input width " + std::to_string(in_bits));
  }
  if (out_bits < 0 || out_bits > 63) {
    fail(ErrorCode::kWidthMismatch, "truth table output width " + std::to_string(out_bits));
  }
  if (table_.size() != (std::size_t{1} << in_bits)) {
    fail(ErrorCode::kWidthMismatch, "truth table has " + std::to_string(table_.size()) +
                                        " entries, expected 2^" + std::to_string(in_bits));
  }
  const std::uint64_t limit = low_mask(out_bits);
  for (std::uint64_t v : table_) {
    if (v > limit) {
      fail(ErrorCode::kWidthMismatch,
           "truth table entry " + std::to_string(v) + " exceeds " + std::to_string(out_bits) +
               " output bits");
    }
  }
}

TruthTable TruthTable::identity(int bits) {
  std::vector<std::uint64_t> t(std::size_t{1} << bits);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i;
  return TruthTable(bits, bits, std::move(t));
}

TruthTable TruthTable::constant(int in_bits, int out_bits, std::uint64_t value) {
  return TruthTable(in_bits, out_bits, std::vector<std::uint64_t>(std::size_t{1} << in_bits, value));
}

int EdgeFunction::in_bits() const {
  return std::visit(
      [](const auto& f) {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, TruthTable>) {
          return f.in_bits();
        } else {
          return f.cols();
        }
      },
      repr_);
}

int EdgeFunction::out_bits() const {
  return std::visit(
      [](const auto& f) {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, TruthTable>) {
          return f.out_bits();
        } else {
          return f.rows();
        }
      },
      repr_);
}

std::uint64_t EdgeFunction::apply(std::uint64_t input) const {
  if (const auto* t = as_table()) return (*t)(input);
  return as_matrix()->apply(input);
}

TruthTable EdgeFunction::to_table() const {
  if (const auto* t = as_table()) return *t;
  const Gf2Matrix& m = *as_matrix();
  if (m.cols() > kMaxTableInputBits) {
    fail(ErrorCode::kSpaceLimit,
         "cannot materialize a table over " + std::to_string(m.cols()) + " input bits");
  }
  const auto masks = m.packed_row_masks();
  std::vector<std::uint64_t> t(std::size_t{1} << m.cols());
  for (std::size_t x = 0; x < t.size(); ++x) {
    std::uint64_t y = 0;
    for (std::uint64_t mask : masks) y = (y << 1) | (std::popcount(x & mask) & 1u);
    t[x] = y;
  }
  return TruthTable(m.cols(), m.rows(), std::move(t));
}

}  // namespace keycast
