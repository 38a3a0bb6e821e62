#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "rau/matrix.hpp"

namespace rau {

using Index = std::uint32_t;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix. Column indices are sorted within each row and
/// unique; explicit zeros are allowed (they carry structure).
class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_(1, 0) {}
  CsrMatrix(std::size_t rows, std::size_t cols);

  /// Validating constructor for raw CSR arrays.
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<Index> col_idx, std::vector<double> values);

  /// Duplicate (row, col) entries are summed. Entries are sorted by
  /// (row, col, value) first, so the result does not depend on input order.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(std::size_t n);
  static CsrMatrix from_dense(const Matrix& dense);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return col_idx_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> mutable_values() noexcept { return values_; }

  std::span<const Index> row_cols(std::size_t r) const noexcept {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const noexcept {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::size_t row_nnz(std::size_t r) const noexcept { return row_ptr_[r + 1] - row_ptr_[r]; }

  /// Value at (r, c), or 0 when structurally absent.
  double at(std::size_t r, std::size_t c) const noexcept;
  bool contains(std::size_t r, std::size_t c) const noexcept;

  Matrix to_dense() const;
  CsrMatrix transposed() const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// out = a * dense. Each output row sums its terms in ascending column order.
Matrix spmm(const CsrMatrix& a, const Matrix& dense);

/// out += a^T * dense. Rows of `a` are visited in ascending order.
void spmm_transposed_accumulate(const CsrMatrix& a, const Matrix& dense, Matrix& out);

}  // namespace rau
