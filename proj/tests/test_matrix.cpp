#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rau/csr.hpp"
#include "rau/error.hpp"
#include "rau/matrix.hpp"
#include "support.hpp"

using namespace rau;

TEST(Matrix, RejectsNonFiniteInput) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Matrix(1, 2, std::vector<double>{1.0, nan}), ValidationError);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1.0, 2.0, 3.0}), ValidationError);
}

TEST(Matrix, MatmulAgainstNaiveLoops) {
  SplitMix64 rng(1);
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.below(13), k = 1 + rng.below(11), n = 1 + rng.below(9);
    Matrix a = test::random_matrix(m, k, rng), b = test::random_matrix(k, n, rng);
    EXPECT_LT(max_abs_diff(matmul(a, b), test::naive_matmul(a, b)), 1e-13);
    EXPECT_LT(max_abs_diff(matmul_tn(transpose(a), b), test::naive_matmul(a, b)), 1e-13);
    EXPECT_LT(max_abs_diff(matmul_nt(a, transpose(b)), test::naive_matmul(a, b)), 1e-13);
  }
}

TEST(Matrix, AccumulateAddsToExisting) {
  Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  Matrix out = Matrix::from_rows({{10, 0}, {0, 10}});
  matmul_accumulate(a, Matrix::identity(2), out);
  EXPECT_EQ(out, Matrix::from_rows({{11, 2}, {3, 14}}));
}

TEST(Matrix, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
  Matrix a(2, 2);
  EXPECT_THROW(a += Matrix(3, 2), ShapeError);
}

TEST(Matrix, HandWorkedProduct) {
  Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  Matrix b = Matrix::from_rows({{7, 8}, {9, 10}, {11, 12}});
  EXPECT_EQ(matmul(a, b), Matrix::from_rows({{58, 64}, {139, 154}}));
}

TEST(Csr, FromTripletsSumsDuplicatesIndependentOfOrder) {
  std::vector<Triplet> t{{1, 0, 2.0}, {0, 1, 1.0}, {1, 0, 3.0}, {0, 0, 4.0}};
  CsrMatrix m = CsrMatrix::from_triplets(2, 2, t);
  std::reverse(t.begin(), t.end());
  EXPECT_EQ(m, CsrMatrix::from_triplets(2, 2, t));
  EXPECT_EQ(m.nnz(), 3u);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 5.0);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 0.0);
  EXPECT_FALSE(m.contains(1, 1));
}

TEST(Csr, ValidatingConstructorRejectsUnsortedColumns) {
  EXPECT_THROW(CsrMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), ValidationError);
  EXPECT_THROW(CsrMatrix(1, 3, {0, 1}, {3}, {1.0}), ValidationError);
  EXPECT_NO_THROW(CsrMatrix(1, 3, {0, 2}, {0, 2}, {1.0, 1.0}));
}

TEST(Csr, DenseRoundTripAndTranspose) {
  SplitMix64 rng(3);
  Matrix d = test::random_matrix(7, 5, rng);
  for (double& x : d.values())
    if (x < 0.3) x = 0.0;
  CsrMatrix s = CsrMatrix::from_dense(d);
  EXPECT_EQ(s.to_dense(), d);
  EXPECT_EQ(s.transposed().to_dense(), transpose(d));
}

TEST(Csr, SpmmMatchesDenseProduct) {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix d = test::random_matrix(1 + rng.below(15), 1 + rng.below(15), rng);
    for (double& x : d.values())
      if (rng.bernoulli(0.6)) x = 0.0;
    Matrix h = test::random_matrix(d.cols(), 1 + rng.below(6), rng);
    CsrMatrix s = CsrMatrix::from_dense(d);
    EXPECT_LT(max_abs_diff(spmm(s, h), test::naive_matmul(d, h)), 1e-14);

    Matrix g = test::random_matrix(d.rows(), h.cols(), rng);
    Matrix acc(d.cols(), h.cols(), 1.0);
    spmm_transposed_accumulate(s, g, acc);
    Matrix expect = test::naive_matmul(transpose(d), g);
    for (double& x : expect.values()) x += 1.0;
    EXPECT_LT(max_abs_diff(acc, expect), 1e-14);
  }
}

TEST(Random, SplitMixReferenceSequence) {
  // First outputs for seed 0 of the published splitmix64 reference.
  SplitMix64 rng(0);
  EXPECT_EQ(rng(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng(), 0x06c45d188009454fULL);
}

TEST(Random, BelowStaysInRangeAndNormalHasUnitMoments) {
  SplitMix64 rng(9);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Random, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, "x"), derive_seed(5, "x"));
}
