#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "elr/kernels.hpp"
#include "kernels_detail.hpp"

namespace elr::kernels::parallel {

using detail::require;

namespace {

// Signed loop bounds keep older OpenMP runtimes happy.
using Row = std::ptrdiff_t;

DenseMatrix transpose(const DenseMatrix& m) { return m.transposed(); }

}  // namespace

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b, int threads) {
  require(a.cols() == b.rows(), "spmm", a.cols(), b.rows());
  DenseMatrix out(a.rows(), b.cols());
  const Row n = static_cast<Row>(a.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Row ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      auto src = b.row(cols[k]);
      const double v = vals[k];
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  require(a.cols() == b.rows(), "gemm", a.cols(), b.rows());
  DenseMatrix out(a.rows(), b.cols());
  const Row n = static_cast<Row>(a.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Row ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto dst = out.row(i);
    auto arow = a.row(i);
    for (std::size_t k = 0; k < arow.size(); ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      auto src = b.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  require(a.rows() == b.rows(), "gemm_tn", a.rows(), b.rows());
  DenseMatrix out(a.cols(), b.cols());
  const Row n_out = static_cast<Row>(a.cols());
  // Each output row k accumulates over i in ascending order, as in the serial
  // kernel.
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Row kk = 0; kk < n_out; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    auto dst = out.row(k);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto src = b.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  require(a.cols() == b.cols(), "gemm_nt", a.cols(), b.cols());
  const DenseMatrix bt = transpose(b);
  DenseMatrix out(a.rows(), b.rows());
  const Row n = static_cast<Row>(a.rows());
  // out(i, :) accumulates a(i,k)·bᵀ(k, :) over ascending k: each lane follows
  // the same sequence as a scalar dot product, but the j loop vectorizes.
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Row ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      auto src = bt.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& lambda, int threads) {
  return gemm_nt(lambda, lambda, threads);
}

SparseMatrix gram_threshold(const DenseMatrix& lambda, double threshold, int threads) {
  const std::size_t n = lambda.rows();
  const std::size_t d = lambda.cols();

  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = lambda.row(i).data();
    norm[i] = std::sqrt(detail::dot(r, r, d));
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return norm[x] > norm[y]; });
  std::vector<double> sorted_norm(n);
  for (std::size_t a = 0; a < n; ++a) sorted_norm[a] = norm[order[a]];

  // Columns permuted into norm order: lt(k, a) = lambda(order[a], k).
  DenseMatrix lt(d, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < d; ++k) lt(k, a) = lambda(order[a], k);

  // Covers rounding in the computed norms and dot product (about 2(d+2) ulp).
  const double margin = 1.0 + 1e-9;
  using Entry = std::pair<std::uint32_t, double>;
  std::vector<std::vector<Entry>> upper(n);

  const Row n_rows = static_cast<Row>(n);
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> acc(n);
#pragma omp for schedule(dynamic, 16)
    for (Row aa = 0; aa < n_rows; ++aa) {
      const auto a = static_cast<std::size_t>(aa);
      std::size_t end = n;
      if (threshold > 0.0) {
        // First position whose bound falls below the threshold.
        const double na = sorted_norm[a];
        end = static_cast<std::size_t>(
            std::partition_point(sorted_norm.begin(), sorted_norm.end(),
                                 [&](double nb) { return na * nb * margin >= threshold; }) -
            sorted_norm.begin());
      }
      if (end <= a) continue;
      std::fill(acc.begin() + static_cast<std::ptrdiff_t>(a),
                acc.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
      const double* li = lambda.row(order[a]).data();
      for (std::size_t k = 0; k < d; ++k) {
        const double lik = li[k];
        const double* src = lt.row(k).data();
        for (std::size_t b = a; b < end; ++b) acc[b] += lik * src[b];
      }
      auto& out = upper[a];
      for (std::size_t b = a; b < end; ++b) {
        const double v = acc[b];
        if (v >= threshold && v != 0.0) out.emplace_back(order[b], v);
      }
    }
  }

  // Mirror the visited pairs into full rows, then sort each row by column.
  std::vector<SparseMatrix::Offset> offsets(n + 1, 0);
  for (std::size_t a = 0; a < n; ++a) {
    const std::uint32_t i = order[a];
    for (const auto& [j, v] : upper[a]) {
      ++offsets[i + 1];
      if (j != i) ++offsets[j + 1];
    }
  }
  for (std::size_t r = 0; r < n; ++r) offsets[r + 1] += offsets[r];
  std::vector<Entry> entries(offsets[n]);
  std::vector<SparseMatrix::Offset> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t a = 0; a < n; ++a) {
    const std::uint32_t i = order[a];
    for (const auto& [j, v] : upper[a]) {
      entries[cursor[i]++] = {j, v};
      if (j != i) entries[cursor[j]++] = {i, v};
    }
    std::vector<Entry>().swap(upper[a]);
  }
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (Row rr = 0; rr < n_rows; ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    std::sort(entries.begin() + static_cast<std::ptrdiff_t>(offsets[r]),
              entries.begin() + static_cast<std::ptrdiff_t>(offsets[r + 1]),
              [](const Entry& x, const Entry& y) { return x.first < y.first; });
  }
  std::vector<SparseMatrix::Column> cols(entries.size());
  std::vector<double> vals(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    cols[k] = entries[k].first;
    vals[k] = entries[k].second;
  }
  return SparseMatrix::from_csr(n, n, std::move(offsets), std::move(cols),
                                std::move(vals));
}

std::vector<double> pattern_dots(const SparseMatrix& pattern, const DenseMatrix& p,
                                 const DenseMatrix& q, int threads) {
  detail::check_pattern(pattern, p, q);
  std::vector<double> out(pattern.nnz());
  const auto offsets = pattern.row_offsets();
  const auto cols = pattern.col_indices();
  const Row n = static_cast<Row>(pattern.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Row ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* pi = p.row(i).data();
    for (auto k = offsets[i]; k < offsets[i + 1]; ++k)
      out[k] = detail::dot(pi, q.row(cols[k]).data(), p.cols());
  }
  return out;
}

}  // namespace elr::kernels::parallel
