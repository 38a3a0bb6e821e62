#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rau/autodiff/tape.hpp"
#include "rau/csr.hpp"

namespace rau::ad {

/// Dense participation mask; nonzero entries take part in the op.
struct Mask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  static Mask all(std::size_t rows, std::size_t cols) {
    return {rows, cols, std::vector<std::uint8_t>(rows * cols, 1)};
  }
  bool operator()(std::size_t r, std::size_t c) const noexcept { return bits[r * cols + c] != 0; }
};

// Every op records itself on the tape of its first operand. All operands must
// live on the same tape.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
/// Adds a 1 x k row to every row of a.
Var add_row(Var a, Var row);
Var elementwise_mul(Var a, Var b);
Var scale(Var a, double factor);
Var sum(Var a);
Var sum_squares(Var a);

Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
Var gather_rows(Var a, std::span<const Index> rows);

Var relu(Var a);
Var leaky_relu(Var a, double slope);
Var sigmoid(Var a);

/// Softmax over the masked entries of each row; masked-out entries are 0.
/// Throws std::logic_error when a row has no unmasked entry.
Var row_softmax_masked(Var a, const Mask& mask);

/// Divides each row by its L2 norm; rows with norm < eps pass through unchanged.
Var row_l2_normalize(Var a, double eps);

/// Row i of the result is the mean of the rows of x selected by mask row i
/// (mask is m x n for an n-row x). Empty selections give a zero row.
Var mean_rows_masked(Var x, const Mask& mask);

/// a * x for a constant sparse matrix. `a` must outlive the backward sweep.
Var spmm(const CsrMatrix& a, Var x);

/// Attention over the structure of `pattern`: for every stored entry (i, j),
/// score = leaky_relu(src[i] + dst[j]), normalised by softmax across row i.
/// Returns an nnz x 1 column aligned with pattern's storage order.
/// `pattern` must outlive the backward sweep.
Var edge_softmax(const CsrMatrix& pattern, Var src, Var dst, double slope);

/// out = A x, where A has the structure of `pattern` and stored values taken
/// from `edge_values` (nnz x 1).
Var spmm_edge(const CsrMatrix& pattern, Var edge_values, Var x);

/// Mean binary cross-entropy of probabilities p (m x 1) against 0/1 targets.
/// Probabilities are clamped to [1e-12, 1 - 1e-12]; the clamp passes no gradient.
Var binary_cross_entropy(Var p, std::span<const double> targets);

inline constexpr double kProbabilityClamp = 1e-12;

}  // namespace rau::ad
