#include "rau/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rau/error.hpp"

namespace rau {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (!std::isfinite(fill)) throw ValidationError("Matrix: non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) + " values for a " +
                     std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  }
  if (!all_finite()) throw ValidationError("Matrix: non-finite entry");
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("Matrix::from_rows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(values));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Matrix::fill(double v) noexcept { std::fill(data_.begin(), data_.end(), v); }

Matrix& Matrix::operator+=(const Matrix& other) {
  if (!same_shape(*this, other)) throw ShapeError("Matrix::operator+=: shape mismatch");
  const double* src = other.data();
  double* dst = data();
  const std::size_t n = data_.size();
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
  return *this;
}

bool same_shape(const Matrix& a, const Matrix& b) noexcept {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

void matmul_accumulate(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.rows() || out.rows() != a.rows() || out.cols() != b.cols()) {
    throw ShapeError("matmul: (" + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     ") * (" + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  // i-k-j order, four rows of `out` at a time so each row of b is loaded once
  // per block. Every output element still sums over p in ascending order.
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    double* o0 = po + i * m;
    double* o1 = o0 + m;
    double* o2 = o1 + m;
    double* o3 = o2 + m;
    const double* a0 = pa + i * k;
    const double* a1 = a0 + k;
    const double* a2 = a1 + k;
    const double* a3 = a2 + k;
    for (std::size_t p = 0; p < k; ++p) {
      const double s0 = a0[p], s1 = a1[p], s2 = a2[p], s3 = a3[p];
      const double* brow = pb + p * m;
      for (std::size_t j = 0; j < m; ++j) {
        const double bj = brow[j];
        o0[j] += s0 * bj;
        o1[j] += s1 * bj;
        o2[j] += s2 * bj;
        o3[j] += s3 * bj;
      }
    }
  }
  for (; i < n; ++i) {
    double* orow = po + i * m;
    const double* arow = pa + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = arow[p];
      const double* brow = pb + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += s * brow[j];
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  matmul_accumulate(a, b, out);
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: row count mismatch");
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  Matrix out(k, m);
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  // out(i, :) accumulates a(r, i) * b(r, :) over r in ascending order; rows of
  // `out` are processed in blocks of four against the same row of b.
  for (std::size_t r = 0; r < n; ++r) {
    const double* arow = pa + r * k;
    const double* brow = pb + r * m;
    std::size_t i = 0;
    for (; i + 4 <= k; i += 4) {
      const double s0 = arow[i], s1 = arow[i + 1], s2 = arow[i + 2], s3 = arow[i + 3];
      double* o0 = po + i * m;
      double* o1 = o0 + m;
      double* o2 = o1 + m;
      double* o3 = o2 + m;
      for (std::size_t j = 0; j < m; ++j) {
        const double bj = brow[j];
        o0[j] += s0 * bj;
        o1[j] += s1 * bj;
        o2[j] += s2 * bj;
        o3[j] += s3 * bj;
      }
    }
    for (; i < k; ++i) {
      const double s = arow[i];
      double* orow = po + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += s * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: column count mismatch");
  return matmul(a, transpose(b));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!same_shape(a, b)) throw ShapeError("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

}  // namespace rau
