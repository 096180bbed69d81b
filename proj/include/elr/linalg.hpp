#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "elr/matrix.hpp"

namespace elr {

struct SvdConfig {
  std::size_t rank = 1;          // d
  std::size_t oversample = 10;   // extra sketch columns
  std::size_t power_iters = 8;   // subspace iterations
  std::uint64_t seed = 0;
};

// Top-d singular triplets of a symmetric matrix (U = V up to sign).
struct TruncatedSvdResult {
  std::vector<double> singular_values;  // non-increasing, >= 0
  DenseMatrix singular_vectors;         // N×d, orthonormal columns
};

// Randomized truncated SVD of a sparse symmetric matrix: Gaussian sketch,
// subspace iteration with re-orthonormalization, then an eigendecomposition of
// the small projected matrix QᵀAQ. Singular values are the |eigenvalues|.
// Each singular vector is signed so that its largest-magnitude entry is
// positive. Deterministic for a given seed.
//
// Throws ArgumentError if rank < 1 or rank + oversample > N, ShapeError if A
// is not square and symmetric, NumericError if A holds non-finite values.
TruncatedSvdResult truncated_svd(const SparseMatrix& a, const SvdConfig& cfg);

// Full symmetric eigendecomposition by cyclic Jacobi rotations, used as a
// test oracle. `values` are singular values (|eigenvalues|) sorted
// non-increasing; `eigenvalues` keeps the signs in the same order; column k of
// `vectors` belongs to entry k of both.
struct SymmetricDecomposition {
  std::vector<double> values;
  std::vector<double> eigenvalues;
  DenseMatrix vectors;
};

inline constexpr std::size_t kOracleMaxDim = 256;

// Throws ArgumentError for N > kOracleMaxDim and ShapeError when A departs from
// symmetry by more than 1e-10.
SymmetricDecomposition full_svd_oracle(const DenseMatrix& a);

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);

double frobenius_sq(const DenseMatrix& m);
double frobenius_sq(const SparseMatrix& m);

}  // namespace elr
