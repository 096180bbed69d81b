#include "elr/kernels.hpp"

#include "kernels_detail.hpp"

namespace elr::kernels::serial {

using detail::require;

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "spmm", a.cols(), b.rows());
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      auto src = b.row(cols[k]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += vals[k] * src[j];
    }
  }
  return out;
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "gemm", a.cols(), b.rows());
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto src = b.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "gemm_tn", a.rows(), b.rows());
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto src = b.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto dst = out.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "gemm_nt", a.cols(), b.cols());
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j)
      out(i, j) = detail::dot(a.row(i).data(), b.row(j).data(), a.cols());
  return out;
}

DenseMatrix gram(const DenseMatrix& lambda) { return gemm_nt(lambda, lambda); }

SparseMatrix gram_threshold(const DenseMatrix& lambda, double threshold) {
  const std::size_t n = lambda.rows();
  const std::size_t d = lambda.cols();
  std::vector<SparseMatrix::Offset> offsets(n + 1, 0);
  std::vector<SparseMatrix::Column> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = detail::dot(lambda.row(i).data(), lambda.row(j).data(), d);
      if (v >= threshold && v != 0.0) {
        cols.push_back(static_cast<SparseMatrix::Column>(j));
        vals.push_back(v);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix::from_csr(n, n, std::move(offsets), std::move(cols),
                                std::move(vals));
}

std::vector<double> pattern_dots(const SparseMatrix& pattern, const DenseMatrix& p,
                                 const DenseMatrix& q) {
  detail::check_pattern(pattern, p, q);
  std::vector<double> out(pattern.nnz());
  const auto offsets = pattern.row_offsets();
  const auto cols = pattern.col_indices();
  for (std::size_t i = 0; i < pattern.rows(); ++i)
    for (auto k = offsets[i]; k < offsets[i + 1]; ++k)
      out[k] = detail::dot(p.row(i).data(), q.row(cols[k]).data(), p.cols());
  return out;
}

}  // namespace elr::kernels::serial
