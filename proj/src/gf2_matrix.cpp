#include "keycast/gf2_matrix.hpp"

#include <bit>
#include <utility>

#include "keycast/error.hpp"

namespace keycast {

namespace {

int words_for(int cols) { return (cols + 63) / 64; }

void xor_row(std::uint64_t* dst, const std::uint64_t* src, int words) {
  for (int w = 0; w < words; ++w) dst[w] ^= src[w];
}

}  // namespace

Gf2Matrix::Gf2Matrix(int rows, int cols) : rows_(rows), cols_(cols), words_(words_for(cols)) {
  if (rows < 0 || cols < 0) fail(ErrorCode::kInvalidArgument, "negative matrix dimension");
  data_.assign(static_cast<std::size_t>(rows) * words_, 0);
}

Gf2Matrix Gf2Matrix::identity(int n) {
  Gf2Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

Gf2Matrix Gf2Matrix::from_bitstrings(const std::vector<std::string>& rows, int cols) {
  Gf2Matrix m(static_cast<int>(rows.size()), cols);
  for (int r = 0; r < m.rows_; ++r) {
    const std::string& row = rows[r];
    if (static_cast<int>(row.size()) != cols) {
      fail(ErrorCode::kWidthMismatch, "bitstring row " + std::to_string(r) + " has length " +
                                          std::to_string(row.size()) + ", expected " +
                                          std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) {
      if (row[c] == '1') {
        m.set(r, c, true);
      } else if (row[c] != '0') {
        fail(ErrorCode::kParse, "bitstring contains a character other than '0'/'1'");
      }
    }
  }
  return m;
}

bool Gf2Matrix::get(int r, int c) const {
  return (row_ptr(r)[c / 64] >> (c % 64)) & 1u;
}

void Gf2Matrix::set(int r, int c, bool value) {
  std::uint64_t& word = row_ptr(r)[c / 64];
  const std::uint64_t bit = std::uint64_t{1} << (c % 64);
  if (value) {
    word |= bit;
  } else {
    word &= ~bit;
  }
}

std::vector<std::string> Gf2Matrix::to_bitstrings() const {
  std::vector<std::string> out(rows_, std::string(cols_, '0'));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (get(r, c)) out[r][c] = '1';
  return out;
}

int Gf2Matrix::rank() const {
  Gf2Matrix work = *this;
  int rank = 0;
  for (int c = 0; c < cols_ && rank < rows_; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows_; ++r) {
      if (work.get(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      for (int w = 0; w < words_; ++w) std::swap(work.row_ptr(pivot)[w], work.row_ptr(rank)[w]);
    }
    for (int r = rank + 1; r < rows_; ++r) {
      if (work.get(r, c)) xor_row(work.row_ptr(r), work.row_ptr(rank), words_);
    }
    ++rank;
  }
  return rank;
}

bool Gf2Matrix::column_is_zero(int c) const {
  for (int r = 0; r < rows_; ++r)
    if (get(r, c)) return false;
  return true;
}

void Gf2Matrix::zero_column(int c) {
  for (int r = 0; r < rows_; ++r) set(r, c, false);
}

int Gf2Matrix::nonzero_column_count() const {
  int count = 0;
  for (int c = 0; c < cols_; ++c)
    if (!column_is_zero(c)) ++count;
  return count;
}

Gf2Matrix Gf2Matrix::transpose() const {
  Gf2Matrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  return t;
}

Gf2Matrix Gf2Matrix::select_columns(std::span<const int> columns) const {
  Gf2Matrix out(rows_, static_cast<int>(columns.size()));
  for (int r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (get(r, columns[j])) out.set(r, static_cast<int>(j), true);
  return out;
}

Gf2Matrix Gf2Matrix::select_rows(std::span<const int> rows) const {
  Gf2Matrix out(static_cast<int>(rows.size()), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int w = 0; w < words_; ++w) out.row_ptr(static_cast<int>(i))[w] = row_ptr(rows[i])[w];
  return out;
}

Gf2Matrix Gf2Matrix::operator*(const Gf2Matrix& rhs) const {
  if (cols_ != rhs.rows_) fail(ErrorCode::kWidthMismatch, "matrix product dimension mismatch");
  Gf2Matrix out(rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = 0; k < cols_; ++k)
      if (get(r, k)) xor_row(out.row_ptr(r), rhs.row_ptr(k), out.words_);
  return out;
}

std::optional<Gf2Matrix> Gf2Matrix::inverse() const {
  if (rows_ != cols_) return std::nullopt;
  auto x = solve_left(identity(rows_));
  if (!x) return std::nullopt;
  // X * A = I for square A implies A * X = I.
  return x;
}

std::optional<Gf2Matrix> Gf2Matrix::solve_left(const Gf2Matrix& rhs) const {
  if (rhs.cols_ != cols_) fail(ErrorCode::kWidthMismatch, "solve_left column mismatch");
  // Row-reduce A while tracking each reduced row as a combination of the original rows.
  Gf2Matrix work = *this;
  Gf2Matrix track = identity(rows_);
  std::vector<int> pivot_col;  // pivot column of reduced row i
  int rank = 0;
  for (int c = 0; c < cols_ && rank < rows_; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows_; ++r) {
      if (work.get(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      for (int w = 0; w < words_; ++w) std::swap(work.row_ptr(pivot)[w], work.row_ptr(rank)[w]);
      for (int w = 0; w < track.words_; ++w)
        std::swap(track.row_ptr(pivot)[w], track.row_ptr(rank)[w]);
    }
    for (int r = 0; r < rows_; ++r) {
      if (r != rank && work.get(r, c)) {
        xor_row(work.row_ptr(r), work.row_ptr(rank), words_);
        xor_row(track.row_ptr(r), track.row_ptr(rank), track.words_);
      }
    }
    pivot_col.push_back(c);
    ++rank;
  }

  Gf2Matrix solution(rhs.rows_, rows_);
  std::vector<std::uint64_t> residual(words_);
  for (int i = 0; i < rhs.rows_; ++i) {
    for (int w = 0; w < words_; ++w) residual[w] = rhs.row_ptr(i)[w];
    for (int p = 0; p < rank; ++p) {
      const int c = pivot_col[p];
      if ((residual[c / 64] >> (c % 64)) & 1u) {
        xor_row(residual.data(), work.row_ptr(p), words_);
        xor_row(solution.row_ptr(i), track.row_ptr(p), solution.words_);
      }
    }
    for (int w = 0; w < words_; ++w)
      if (residual[w] != 0) return std::nullopt;
  }
  return solution;
}

std::uint64_t Gf2Matrix::apply(std::uint64_t x) const {
  if (cols_ > 64 || rows_ > 64) fail(ErrorCode::kSpaceLimit, "apply requires at most 64x64");
  const auto masks = packed_row_masks();
  std::uint64_t y = 0;
  for (int r = 0; r < rows_; ++r) {
    y = (y << 1) | static_cast<std::uint64_t>(std::popcount(x & masks[r]) & 1);
  }
  return y;
}

std::vector<std::uint64_t> Gf2Matrix::packed_row_masks() const {
  if (cols_ > 64) fail(ErrorCode::kSpaceLimit, "packed masks require at most 64 columns");
  std::vector<std::uint64_t> masks(rows_, 0);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (get(r, c)) masks[r] |= std::uint64_t{1} << (cols_ - 1 - c);
  return masks;
}

}  // namespace keycast
