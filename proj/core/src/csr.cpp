#include "rau/csr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rau/error.hpp"

namespace rau {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<Index> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != col_idx_.size() ||
      col_idx_.size() != values_.size()) {
    throw ValidationError("CsrMatrix: inconsistent array lengths");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_ptr_[r] > row_ptr_[r + 1]) throw ValidationError("CsrMatrix: row_ptr not monotone");
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw ValidationError("CsrMatrix: column index out of range");
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
        throw ValidationError("CsrMatrix: columns unsorted or duplicated in row " + std::to_string(r));
      if (!std::isfinite(values_[k])) throw ValidationError("CsrMatrix: non-finite value");
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw ValidationError("CsrMatrix: triplet out of range");
    if (!std::isfinite(t.value)) throw ValidationError("CsrMatrix: non-finite triplet");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col, a.value) < std::tie(b.row, b.col, b.value);
  });
  CsrMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < triplets.size() && triplets[i].row == r) {
      const Index c = triplets[i].col;
      double sum = 0.0;
      while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
        sum += triplets[i].value;
        ++i;
      }
      m.col_idx_.push_back(c);
      m.values_.push_back(sum);
    }
    m.row_ptr_[r + 1] = m.col_idx_.size();
  }
  return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<std::size_t> ptr(n + 1);
  std::vector<Index> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    ptr[i + 1] = i + 1;
    idx[i] = static_cast<Index>(i);
  }
  return CsrMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

CsrMatrix CsrMatrix::from_dense(const Matrix& dense) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < dense.rows(); ++i)
    for (std::size_t j = 0; j < dense.cols(); ++j)
      if (dense(i, j) != 0.0) t.push_back({static_cast<Index>(i), static_cast<Index>(j), dense(i, j)});
  return from_triplets(dense.rows(), dense.cols(), std::move(t));
}

double CsrMatrix::at(std::size_t r, std::size_t c) const noexcept {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<Index>(c));
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

bool CsrMatrix::contains(std::size_t r, std::size_t c) const noexcept {
  auto cols = row_cols(r);
  return std::binary_search(cols.begin(), cols.end(), static_cast<Index>(c));
}

Matrix CsrMatrix::to_dense() const {
  Matrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) = values_[k];
  return d;
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t(cols_, rows_);
  for (Index c : col_idx_) ++t.row_ptr_[c + 1];
  for (std::size_t i = 0; i < cols_; ++i) t.row_ptr_[i + 1] += t.row_ptr_[i];
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<std::size_t> cursor(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  // Rows are visited in ascending order, so each transposed row stays sorted.
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t dst = cursor[col_idx_[k]]++;
      t.col_idx_[dst] = static_cast<Index>(r);
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

Matrix spmm(const CsrMatrix& a, const Matrix& dense) {
  if (a.cols() != dense.rows()) {
    throw ShapeError("spmm: sparse " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times dense " + std::to_string(dense.rows()) + "x" +
                     std::to_string(dense.cols()));
  }
  const std::size_t k = dense.cols();
  Matrix out(a.rows(), k);
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double* orow = out.data() + r * k;
    for (std::size_t e = ptr[r]; e < ptr[r + 1]; ++e) {
      const double w = val[e];
      const double* drow = dense.data() + static_cast<std::size_t>(idx[e]) * k;
      for (std::size_t j = 0; j < k; ++j) orow[j] += w * drow[j];
    }
  }
  return out;
}

void spmm_transposed_accumulate(const CsrMatrix& a, const Matrix& dense, Matrix& out) {
  if (a.rows() != dense.rows() || out.rows() != a.cols() || out.cols() != dense.cols())
    throw ShapeError("spmm_transposed: shape mismatch");
  const std::size_t k = dense.cols();
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* drow = dense.data() + r * k;
    for (std::size_t e = ptr[r]; e < ptr[r + 1]; ++e) {
      const double w = val[e];
      double* orow = out.data() + static_cast<std::size_t>(idx[e]) * k;
      for (std::size_t j = 0; j < k; ++j) orow[j] += w * drow[j];
    }
  }
}

}  // namespace rau
