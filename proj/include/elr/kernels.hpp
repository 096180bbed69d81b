#pragma once

// Data-parallel kernels used by the hot paths (message passing, the SVD
// sketch, and the low-rank reconstruction).
//
// Every kernel exists twice: a straightforward serial reference in
// kernels::serial, and an OpenMP implementation in kernels::parallel. Both
// accumulate each output element in the same order (ascending inner index),
// so their results are bit-identical; the tests hold them to that. The
// functions directly in kernels:: run the OpenMP implementation with
// thread_count() threads.

#include <cstddef>
#include <span>
#include <vector>

#include "elr/matrix.hpp"

namespace elr::kernels {

// Threads used by the dispatching kernels. Initialised from the ELR_THREADS
// environment variable (default 1). Values < 1 are clamped to 1.
int thread_count();
void set_thread_count(int threads);

namespace serial {

// A · B for CSR A.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
// A · B. Zero entries of A are skipped.
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
// Aᵀ · B. Zero entries of A are skipped.
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
// A · Bᵀ.
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);
// Λ Λᵀ as a dense matrix.
DenseMatrix gram(const DenseMatrix& lambda);
// Entries of Λ Λᵀ with value >= threshold (and != 0), as CSR. Brute force over
// all N² pairs.
SparseMatrix gram_threshold(const DenseMatrix& lambda, double threshold);
// For every stored (i, j) of `pattern`: row_i(p) · row_j(q), in CSR order.
std::vector<double> pattern_dots(const SparseMatrix& pattern, const DenseMatrix& p,
                                 const DenseMatrix& q);

}  // namespace serial

namespace parallel {

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b, int threads);
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b, int threads);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b, int threads);
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b, int threads);
DenseMatrix gram(const DenseMatrix& lambda, int threads);
// Same output as serial::gram_threshold. Visits each unordered pair once, in
// order of decreasing row norm, and stops as soon as the Cauchy–Schwarz bound
// ‖Λ_i‖‖Λ_j‖ (with a rounding margin) drops below the threshold.
SparseMatrix gram_threshold(const DenseMatrix& lambda, double threshold, int threads);
std::vector<double> pattern_dots(const SparseMatrix& pattern, const DenseMatrix& p,
                                 const DenseMatrix& q, int threads);

}  // namespace parallel

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gram(const DenseMatrix& lambda);
SparseMatrix gram_threshold(const DenseMatrix& lambda, double threshold);
std::vector<double> pattern_dots(const SparseMatrix& pattern, const DenseMatrix& p,
                                 const DenseMatrix& q);

}  // namespace elr::kernels
