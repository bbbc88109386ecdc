#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace keycast {

// Dense bit matrix over GF(2).
//
// When applied to a packed bit vector, column 0 reads the most significant
// input bit and row 0 writes the most significant output bit, matching the
// MSB-first bitstrings used in code files.
class Gf2Matrix {
 public:
  Gf2Matrix() = default;
  Gf2Matrix(int rows, int cols);

  static Gf2Matrix identity(int n);
  // Each string is one row of exactly `cols` '0'/'1' characters.
  static Gf2Matrix from_bitstrings(const std::vector<std::string>& rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const;
  void set(int r, int c, bool value);

  std::vector<std::string> to_bitstrings() const;

  int rank() const;
  bool column_is_zero(int c) const;
  void zero_column(int c);
  int nonzero_column_count() const;

  Gf2Matrix transpose() const;
  Gf2Matrix select_columns(std::span<const int> columns) const;
  Gf2Matrix select_rows(std::span<const int> rows) const;
  Gf2Matrix operator*(const Gf2Matrix& rhs) const;

  // Inverse of a square full-rank matrix.
  std::optional<Gf2Matrix> inverse() const;
  // Some X with X * (*this) = rhs, i.e. every row of rhs lies in the row space.
  std::optional<Gf2Matrix> solve_left(const Gf2Matrix& rhs) const;

  // y = A x on packed vectors. Requires cols <= 64 and rows <= 64.
  std::uint64_t apply(std::uint64_t x) const;
  // mask[r] selects the packed input bits summed into row r.
  std::vector<std::uint64_t> packed_row_masks() const;

  bool operator==(const Gf2Matrix& other) const = default;

 private:
  std::uint64_t* row_ptr(int r) { return data_.data() + static_cast<std::size_t>(r) * words_; }
  const std::uint64_t* row_ptr(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * words_;
  }

  int rows_ = 0;
  int cols_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> data_;
};

}  // namespace keycast
