#include "elr/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

namespace elr::kernels {

namespace {

int threads_from_env() {
  const char* env = std::getenv("ELR_THREADS");
  if (env == nullptr) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (...) {
    return 1;
  }
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{threads_from_env()};
  return threads;
}

}  // namespace

int thread_count() { return thread_setting().load(std::memory_order_relaxed); }

void set_thread_count(int threads) {
  thread_setting().store(std::max(1, threads), std::memory_order_relaxed);
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  return parallel::spmm(a, b, thread_count());
}
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  return parallel::gemm(a, b, thread_count());
}
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  return parallel::gemm_tn(a, b, thread_count());
}
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  return parallel::gemm_nt(a, b, thread_count());
}
DenseMatrix gram(const DenseMatrix& lambda) {
  return parallel::gram(lambda, thread_count());
}
SparseMatrix gram_threshold(const DenseMatrix& lambda, double threshold) {
  return parallel::gram_threshold(lambda, threshold, thread_count());
}
std::vector<double> pattern_dots(const SparseMatrix& pattern, const DenseMatrix& p,
                                 const DenseMatrix& q) {
  return parallel::pattern_dots(pattern, p, q, thread_count());
}

}  // namespace elr::kernels
