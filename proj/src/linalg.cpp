#include "elr/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "elr/error.hpp"
#include "elr/kernels.hpp"

namespace elr {

namespace {

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMatrix to_eigen(const DenseMatrix& m) {
  return Eigen::Map<const EigenMatrix>(m.data().data(),
                                       static_cast<Eigen::Index>(m.rows()),
                                       static_cast<Eigen::Index>(m.cols()));
}

DenseMatrix from_eigen(const EigenMatrix& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  Eigen::Map<EigenMatrix>(out.data().data(), m.rows(), m.cols()) = m;
  return out;
}

// Thin orthonormal basis of the column space of y (Householder QR).
DenseMatrix orthonormalize(const DenseMatrix& y) {
  const EigenMatrix ey = to_eigen(y);
  Eigen::HouseholderQR<EigenMatrix> qr(ey);
  EigenMatrix q = qr.householderQ() * EigenMatrix::Identity(ey.rows(), ey.cols());
  return from_eigen(q);
}

// Permutation sorting by |value| descending, ties by signed value descending.
std::vector<std::size_t> magnitude_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(values[x]);
    const double ay = std::abs(values[y]);
    if (ax != ay) return ax > ay;
    return values[x] > values[y];
  });
  return order;
}

void fix_signs(DenseMatrix& vectors) {
  for (std::size_t c = 0; c < vectors.cols(); ++c) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
      const double m = std::abs(vectors(r, c));
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    if (vectors.rows() > 0 && vectors(arg, c) < 0.0)
      for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, c) = -vectors(r, c);
  }
}

}  // namespace

TruncatedSvdResult truncated_svd(const SparseMatrix& a, const SvdConfig& cfg) {
  if (!a.is_square()) throw ShapeError("truncated_svd: matrix is not square");
  const std::size_t n = a.rows();
  if (cfg.rank < 1) throw ArgumentError("truncated_svd: rank must be >= 1");
  if (cfg.rank + cfg.oversample > n)
    throw ArgumentError("truncated_svd: rank + oversample = " +
                        std::to_string(cfg.rank + cfg.oversample) + " exceeds N = " +
                        std::to_string(n));
  if (!a.all_finite()) throw NumericError("truncated_svd: matrix has non-finite entries");
  if (!a.is_symmetric()) throw ShapeError("truncated_svd: matrix is not symmetric");

  const std::size_t sketch = cfg.rank + cfg.oversample;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix omega(n, sketch);
  for (double& v : omega.data()) v = gauss(rng);

  DenseMatrix q = orthonormalize(kernels::spmm(a, omega));
  for (std::size_t it = 0; it < cfg.power_iters; ++it)
    q = orthonormalize(kernels::spmm(a, q));

  // Projected matrix B = Qᵀ A Q, symmetrized against rounding.
  const DenseMatrix aq = kernels::spmm(a, q);
  const DenseMatrix b = kernels::gemm_tn(q, aq);
  EigenMatrix eb(static_cast<Eigen::Index>(sketch), static_cast<Eigen::Index>(sketch));
  for (std::size_t i = 0; i < sketch; ++i)
    for (std::size_t j = 0; j < sketch; ++j)
      eb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          0.5 * (b(i, j) + b(j, i));

  Eigen::SelfAdjointEigenSolver<EigenMatrix> solver(eb);
  if (solver.info() != Eigen::Success)
    throw NumericError("truncated_svd: projected eigensolve failed");
  std::vector<double> evals(sketch);
  for (std::size_t i = 0; i < sketch; ++i)
    evals[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
  const auto order = magnitude_order(evals);

  DenseMatrix small(sketch, cfg.rank);
  TruncatedSvdResult result;
  result.singular_values.resize(cfg.rank);
  for (std::size_t c = 0; c < cfg.rank; ++c) {
    const auto src = static_cast<Eigen::Index>(order[c]);
    result.singular_values[c] = std::abs(evals[order[c]]);
    for (std::size_t r = 0; r < sketch; ++r)
      small(r, c) = solver.eigenvectors()(static_cast<Eigen::Index>(r), src);
  }
  result.singular_vectors = kernels::gemm(q, small);
  fix_signs(result.singular_vectors);
  return result;
}

SymmetricDecomposition full_svd_oracle(const DenseMatrix& input) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw ShapeError("full_svd_oracle: matrix is not square");
  if (n > kOracleMaxDim)
    throw ArgumentError("full_svd_oracle: N = " + std::to_string(n) + " exceeds " +
                        std::to_string(kOracleMaxDim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > 1e-10)
        throw ShapeError("full_svd_oracle: matrix is not symmetric");

  DenseMatrix m = input;
  DenseMatrix v = DenseMatrix::identity(n);
  double total = 0.0;
  for (double x : m.data()) total += x * x;
  const double tol = 1e-12 * std::sqrt(total);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += m(i, j) * m(i, j);
    if (std::sqrt(off) <= tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // M <- Jᵀ M J with J the (p, q) rotation.
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = m(i, i);
  const auto order = magnitude_order(diag);
  SymmetricDecomposition out;
  out.values.resize(n);
  out.eigenvalues.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = diag[order[c]];
    out.values[c] = std::abs(diag[order[c]]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) { return kernels::spmm(a, b); }

double frobenius_sq(const DenseMatrix& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v * v;
  return sum;
}

double frobenius_sq(const SparseMatrix& m) {
  double sum = 0.0;
  for (double v : m.values()) sum += v * v;
  return sum;
}

}  // namespace elr
