#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace elr {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  void fill(double value);
  bool all_finite() const noexcept;
  DenseMatrix transposed() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Compressed sparse row matrix.
//
// Invariants (checked by from_csr and validate()):
//   - row_offsets has rows()+1 entries, starts at 0, is non-decreasing and
//     ends at nnz();
//   - column indices within a row are strictly increasing and < cols();
//   - no stored value is exactly zero.
class SparseMatrix {
 public:
  using Offset = std::size_t;
  using Column = std::uint32_t;

  SparseMatrix() : row_offsets_(1, 0) {}
  SparseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

  // Takes ownership of CSR arrays and throws ShapeError if they break an
  // invariant.
  static SparseMatrix from_csr(std::size_t rows, std::size_t cols,
                               std::vector<Offset> row_offsets,
                               std::vector<Column> col_indices,
                               std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  std::span<const Offset> row_offsets() const noexcept { return row_offsets_; }
  std::span<const Column> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const Column> row_cols(std::size_t r) const noexcept {
    return {col_indices_.data() + row_offsets_[r],
            row_offsets_[r + 1] - row_offsets_[r]};
  }
  std::span<const double> row_values(std::size_t r) const noexcept {
    return {values_.data() + row_offsets_[r],
            row_offsets_[r + 1] - row_offsets_[r]};
  }

  // Stored value at (r, c), or 0 when absent. Binary search within the row.
  double at(std::size_t r, std::size_t c) const noexcept;
  bool contains(std::size_t r, std::size_t c) const noexcept;

  // Description of the first violated CSR invariant, if any.
  std::optional<std::string> validate() const;

  // Exact symmetry: same pattern and bit-equal mirrored values.
  bool is_symmetric() const noexcept;
  bool has_zero_diagonal() const noexcept;
  bool all_finite() const noexcept;

  // Number of stored (i, j) pairs with i < j.
  std::size_t upper_triangle_count() const noexcept;

  DenseMatrix to_dense() const;
  SparseMatrix transposed() const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Offset> row_offsets_;
  std::vector<Column> col_indices_;
  std::vector<double> values_;
};

struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  double weight = 1.0;
};

// Symmetric n×n adjacency from an undirected edge list. Each edge is stored as
// both (i,j) and (j,i); a repeated pair (in either orientation) keeps the
// last-seen weight; self-loops and zero weights are dropped. Throws
// ArgumentError naming the offending edge when an index is out of range or a
// weight is not finite.
SparseMatrix build_symmetric(std::size_t n, std::span<const Edge> edges);

// Canonical undirected edge list (i < j, ascending) of a symmetric matrix.
std::vector<Edge> upper_edges(const SparseMatrix& a);

// Row sums in ascending column order.
std::vector<double> degree_vector(const SparseMatrix& a);

// Degrees below this are treated as zero by sym_normalize.
inline constexpr double kMinDegree = 1e-12;

struct NormalizeDiagnostics {
  std::size_t zero_degree_rows = 0;
  std::size_t negative_degree_rows = 0;
};

// D^{-1/2} A D^{-1/2}, optionally on A + I. Rows whose degree is below
// kMinDegree, or negative, come out empty; the latter are counted in
// `diagnostics`. Output is exactly symmetric when the input is.
SparseMatrix sym_normalize(const SparseMatrix& a, bool add_self_loops,
                           NormalizeDiagnostics* diagnostics = nullptr);

}  // namespace elr
