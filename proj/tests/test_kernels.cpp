#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "elr/kernels.hpp"
#include "elr/linalg.hpp"
#include "oracles.hpp"

using namespace elr;
namespace k = elr::kernels;

namespace {

void expect_close(const DenseMatrix& a, const DenseMatrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a.data()[i], b.data()[i], tol) << "at flat index " << i;
}

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density,
                           std::mt19937_64& rng) {
  DenseMatrix d = oracle::random_dense(rows, cols, rng);
  std::bernoulli_distribution keep(density);
  for (double& v : d.data())
    if (!keep(rng)) v = 0.0;
  return oracle::sparse(d);
}

}  // namespace

TEST(Spmm, EmptyTimesAnythingIsZero) {
  std::mt19937_64 rng(1);
  const auto b = oracle::random_dense(5, 3, rng);
  const auto out = k::serial::spmm(SparseMatrix(5, 5), b);
  EXPECT_EQ(out, DenseMatrix(5, 3));
}

TEST(Spmm, IdentityPatternReturnsB) {
  std::mt19937_64 rng(2);
  const auto b = oracle::random_dense(6, 4, rng);
  const auto eye = oracle::sparse(DenseMatrix::identity(6));
  EXPECT_EQ(k::serial::spmm(eye, b), b);
  EXPECT_EQ(k::parallel::spmm(eye, b, 3), b);
}

TEST(Spmm, RandomMatchesDenseOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_sparse(8, 8, 0.4, rng);
    const auto b = oracle::random_dense(8, 3, rng);
    expect_close(k::serial::spmm(a, b), oracle::matmul(oracle::dense(a), b), 1e-13);
  }
}

TEST(Spmm, RejectsShapeMismatch) {
  EXPECT_THROW(k::serial::spmm(SparseMatrix(3, 3), DenseMatrix(2, 2)), std::exception);
  EXPECT_THROW(k::parallel::spmm(SparseMatrix(3, 3), DenseMatrix(2, 2), 2), std::exception);
}

TEST(Gemm, VariantsMatchDenseOracle) {
  std::mt19937_64 rng(4);
  const auto a = oracle::random_dense(7, 5, rng);
  const auto b = oracle::random_dense(5, 4, rng);
  const auto c = oracle::random_dense(7, 4, rng);
  const auto e = oracle::random_dense(3, 5, rng);
  expect_close(k::serial::gemm(a, b), oracle::matmul(a, b), 1e-13);
  expect_close(k::serial::gemm_tn(a, c), oracle::matmul(oracle::transpose(a), c), 1e-13);
  expect_close(k::serial::gemm_nt(a, e), oracle::matmul(a, oracle::transpose(e)), 1e-13);
}

TEST(Gram, Examples) {
  DenseMatrix ones(2, 1, 1.0);
  EXPECT_EQ(k::serial::gram(ones), DenseMatrix(2, 2, 1.0));
  EXPECT_EQ(k::serial::gram(DenseMatrix(3, 2)), DenseMatrix(3, 3));
  std::mt19937_64 rng(5);
  const auto lambda = oracle::random_dense(6, 2, rng);
  expect_close(k::serial::gram(lambda), oracle::matmul(lambda, oracle::transpose(lambda)),
               1e-13);
  EXPECT_EQ(k::serial::gram(lambda), oracle::low_rank(lambda, {1.0, 1.0}));
}

TEST(GramThreshold, SupportIsExactlyTheEntriesAboveThreshold) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto lambda = oracle::random_dense(12, 3, rng, 0.7);
    const double t = trial % 3 == 0 ? 0.0 : 0.1 * (trial % 7);
    const auto full = k::serial::gram(lambda);
    for (int threads : {1, 2, 4}) {
      const auto s = k::parallel::gram_threshold(lambda, t, threads);
      EXPECT_FALSE(s.validate().has_value());
      for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) {
          const bool expect = full(i, j) >= t && full(i, j) != 0.0;
          EXPECT_EQ(s.contains(i, j), expect);
          if (expect) { EXPECT_EQ(s.at(i, j), full(i, j)); }
        }
    }
    EXPECT_EQ(k::serial::gram_threshold(lambda, t), k::parallel::gram_threshold(lambda, t, 3));
  }
}

TEST(PatternDots, MatchesRowProducts) {
  std::mt19937_64 rng(7);
  const auto pattern = oracle::random_graph(10, 0.3, rng);
  const auto p = oracle::random_dense(10, 4, rng);
  const auto q = oracle::random_dense(10, 4, rng);
  const auto got = k::serial::pattern_dots(pattern, p, q);
  const auto pq = oracle::matmul(p, oracle::transpose(q));
  std::size_t idx = 0;
  for (std::size_t i = 0; i < 10; ++i)
    for (auto j : pattern.row_cols(i)) EXPECT_NEAR(got[idx++], pq(i, j), 1e-13);
  EXPECT_EQ(idx, got.size());
}

// The OpenMP kernels must be bit-identical to the serial reference at every
// thread count.
TEST(ParallelKernels, BitIdenticalToSerial) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 30 + rng() % 50;
    const auto a = oracle::random_graph(n, 0.1, rng);
    const auto b = oracle::random_dense(n, 5, rng);
    const auto c = oracle::random_dense(n, 7, rng);
    const auto w = oracle::random_dense(5, 6, rng);
    const auto lambda = oracle::random_dense(n, 4, rng, 0.5);
    for (int threads : {1, 2, 3, 8}) {
      EXPECT_EQ(k::parallel::spmm(a, b, threads), k::serial::spmm(a, b));
      EXPECT_EQ(k::parallel::gemm(b, w, threads), k::serial::gemm(b, w));
      EXPECT_EQ(k::parallel::gemm_tn(b, c, threads), k::serial::gemm_tn(b, c));
      EXPECT_EQ(k::parallel::gemm_nt(b, b, threads), k::serial::gemm_nt(b, b));
      EXPECT_EQ(k::parallel::gram(lambda, threads), k::serial::gram(lambda));
      EXPECT_EQ(k::parallel::gram_threshold(lambda, 0.05, threads),
                k::serial::gram_threshold(lambda, 0.05));
      EXPECT_EQ(k::parallel::pattern_dots(a, b, b, threads), k::serial::pattern_dots(a, b, b));
    }
  }
}

TEST(ParallelKernels, ThreadSettingClampsAndDispatches) {
  const int before = k::thread_count();
  k::set_thread_count(0);
  EXPECT_EQ(k::thread_count(), 1);
  k::set_thread_count(4);
  EXPECT_EQ(k::thread_count(), 4);
  std::mt19937_64 rng(9);
  const auto a = oracle::random_graph(40, 0.1, rng);
  const auto b = oracle::random_dense(40, 3, rng);
  EXPECT_EQ(k::spmm(a, b), k::serial::spmm(a, b));
  k::set_thread_count(before);
}

TEST(Frobenius, Examples) {
  EXPECT_EQ(frobenius_sq(DenseMatrix(3, 3)), 0.0);
  EXPECT_EQ(frobenius_sq(DenseMatrix::identity(4)), 4.0);
  EXPECT_EQ(frobenius_sq(oracle::sparse(DenseMatrix::identity(4))), 4.0);
  std::mt19937_64 rng(10);
  const auto m = oracle::random_dense(10, 10, rng);
  double expect = 0.0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) expect += m(i, j) * m(i, j);
  EXPECT_LE(oracle::rel_error(frobenius_sq(m), expect), 1e-13);
  EXPECT_LE(oracle::rel_error(frobenius_sq(oracle::sparse(m)), expect), 1e-13);
}
