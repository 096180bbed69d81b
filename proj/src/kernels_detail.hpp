#pragma once

#include <string>

#include "elr/error.hpp"
#include "elr/matrix.hpp"

namespace elr::kernels::detail {

inline void require(bool ok, const char* kernel, std::size_t lhs, std::size_t rhs) {
  if (!ok)
    throw ShapeError(std::string(kernel) + ": inner dimensions disagree (" +
                     std::to_string(lhs) + " vs " + std::to_string(rhs) + ")");
}

inline void check_pattern(const SparseMatrix& pattern, const DenseMatrix& p,
                          const DenseMatrix& q) {
  require(pattern.rows() == p.rows(), "pattern_dots", pattern.rows(), p.rows());
  require(pattern.cols() == q.rows(), "pattern_dots", pattern.cols(), q.rows());
  require(p.cols() == q.cols(), "pattern_dots", p.cols(), q.cols());
}

inline double dot(const double* a, const double* b, std::size_t n) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

}  // namespace elr::kernels::detail
