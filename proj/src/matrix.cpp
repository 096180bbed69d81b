#include "elr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "elr/error.hpp"

namespace elr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("DenseMatrix: data length " + std::to_string(data_.size()) +
                     " != " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

SparseMatrix SparseMatrix::from_csr(std::size_t rows, std::size_t cols,
                                    std::vector<Offset> row_offsets,
                                    std::vector<Column> col_indices,
                                    std::vector<double> values) {
  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_ = std::move(row_offsets);
  m.col_indices_ = std::move(col_indices);
  m.values_ = std::move(values);
  if (auto problem = m.validate()) throw ShapeError("SparseMatrix: " + *problem);
  return m;
}

std::optional<std::string> SparseMatrix::validate() const {
  if (row_offsets_.size() != rows_ + 1) return "row_offsets length != rows+1";
  if (row_offsets_.front() != 0) return "row_offsets[0] != 0";
  if (col_indices_.size() != values_.size()) return "col_indices/values length mismatch";
  if (row_offsets_.back() != values_.size()) return "row_offsets.back() != nnz";
  for (std::size_t r = 0; r < rows_; ++r) {
    if (row_offsets_[r + 1] < row_offsets_[r])
      return "row_offsets decreasing at row " + std::to_string(r);
    for (Offset k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (col_indices_[k] >= cols_)
        return "column out of range in row " + std::to_string(r);
      if (k > row_offsets_[r] && col_indices_[k] <= col_indices_[k - 1])
        return "columns not strictly increasing in row " + std::to_string(r);
      if (values_[k] == 0.0)
        return "explicit zero stored in row " + std::to_string(r);
    }
  }
  return std::nullopt;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const noexcept {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<Column>(c));
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_offsets_[r] + static_cast<std::size_t>(it - cols.begin())];
}

bool SparseMatrix::contains(std::size_t r, std::size_t c) const noexcept {
  auto cols = row_cols(r);
  return std::binary_search(cols.begin(), cols.end(), static_cast<Column>(c));
}

bool SparseMatrix::is_symmetric() const noexcept {
  if (!is_square()) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (Offset k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const std::size_t c = col_indices_[k];
      if (!contains(c, r) || at(c, r) != values_[k]) return false;
    }
  }
  return true;
}

bool SparseMatrix::has_zero_diagonal() const noexcept {
  const std::size_t n = std::min(rows_, cols_);
  for (std::size_t i = 0; i < n; ++i)
    if (contains(i, i)) return false;
  return true;
}

bool SparseMatrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::size_t SparseMatrix::upper_triangle_count() const noexcept {
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (auto c : row_cols(r))
      if (c > r) ++count;
  return count;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (Offset k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      d(r, col_indices_[k]) = values_[k];
  return d;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Offset> offsets(cols_ + 1, 0);
  for (auto c : col_indices_) ++offsets[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) offsets[c + 1] += offsets[c];
  std::vector<Column> cols(nnz());
  std::vector<double> vals(nnz());
  std::vector<Offset> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (Offset k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const Offset dst = cursor[col_indices_[k]]++;
      cols[dst] = static_cast<Column>(r);
      vals[dst] = values_[k];
    }
  }
  SparseMatrix t;
  t.rows_ = cols_;
  t.cols_ = rows_;
  t.row_offsets_ = std::move(offsets);
  t.col_indices_ = std::move(cols);
  t.values_ = std::move(vals);
  return t;
}

SparseMatrix build_symmetric(std::size_t n, std::span<const Edge> edges) {
  // Canonical key (min, max) -> last-seen weight.
  std::unordered_map<std::uint64_t, double> last;
  last.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    if (edge.src >= n || edge.dst >= n) {
      throw ArgumentError("edge #" + std::to_string(e) + " (" +
                          std::to_string(edge.src) + ", " + std::to_string(edge.dst) +
                          ") out of range for n=" + std::to_string(n));
    }
    if (!std::isfinite(edge.weight)) {
      throw ArgumentError("edge #" + std::to_string(e) + " (" +
                          std::to_string(edge.src) + ", " + std::to_string(edge.dst) +
                          ") has non-finite weight");
    }
    if (edge.src == edge.dst) continue;
    const std::uint64_t lo = std::min(edge.src, edge.dst);
    const std::uint64_t hi = std::max(edge.src, edge.dst);
    last[(lo << 32) | hi] = edge.weight;
  }

  std::vector<std::pair<std::uint64_t, double>> pairs;
  pairs.reserve(2 * last.size());
  for (const auto& [key, w] : last) {
    if (w == 0.0) continue;
    const std::uint64_t lo = key >> 32;
    const std::uint64_t hi = key & 0xffffffffULL;
    pairs.emplace_back((lo << 32) | hi, w);
    pairs.emplace_back((hi << 32) | lo, w);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<SparseMatrix::Offset> offsets(n + 1, 0);
  std::vector<SparseMatrix::Column> cols;
  std::vector<double> vals;
  cols.reserve(pairs.size());
  vals.reserve(pairs.size());
  for (const auto& [key, w] : pairs) {
    ++offsets[(key >> 32) + 1];
    cols.push_back(static_cast<SparseMatrix::Column>(key & 0xffffffffULL));
    vals.push_back(w);
  }
  for (std::size_t r = 0; r < n; ++r) offsets[r + 1] += offsets[r];
  return SparseMatrix::from_csr(n, n, std::move(offsets), std::move(cols),
                                std::move(vals));
}

std::vector<Edge> upper_edges(const SparseMatrix& a) {
  std::vector<Edge> edges;
  edges.reserve(a.upper_triangle_count());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto cols = a.row_cols(r);
    auto vals = a.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] > r)
        edges.push_back({static_cast<std::uint32_t>(r), cols[k], vals[k]});
  }
  return edges;
}

std::vector<double> degree_vector(const SparseMatrix& a) {
  if (!a.is_square()) throw ShapeError("degree_vector: matrix is not square");
  std::vector<double> deg(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double sum = 0.0;
    for (double v : a.row_values(r)) sum += v;
    deg[r] = sum;
  }
  return deg;
}

SparseMatrix sym_normalize(const SparseMatrix& a, bool add_self_loops,
                           NormalizeDiagnostics* diagnostics) {
  if (!a.is_square()) throw ShapeError("sym_normalize: matrix is not square");
  const std::size_t n = a.rows();

  // Working pattern, with the diagonal inserted (or incremented) for A + I.
  std::vector<SparseMatrix::Offset> offsets(n + 1, 0);
  std::vector<SparseMatrix::Column> cols;
  std::vector<double> vals;
  cols.reserve(a.nnz() + (add_self_loops ? n : 0));
  vals.reserve(cols.capacity());
  for (std::size_t r = 0; r < n; ++r) {
    auto rc = a.row_cols(r);
    auto rv = a.row_values(r);
    bool diag_done = !add_self_loops;
    for (std::size_t k = 0; k < rc.size(); ++k) {
      if (!diag_done && rc[k] >= r) {
        if (rc[k] == r) {
          cols.push_back(rc[k]);
          vals.push_back(rv[k] + 1.0);
          diag_done = true;
          continue;
        }
        cols.push_back(static_cast<SparseMatrix::Column>(r));
        vals.push_back(1.0);
        diag_done = true;
      }
      cols.push_back(rc[k]);
      vals.push_back(rv[k]);
    }
    if (!diag_done) {
      cols.push_back(static_cast<SparseMatrix::Column>(r));
      vals.push_back(1.0);
    }
    offsets[r + 1] = cols.size();
  }

  NormalizeDiagnostics diag;
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double deg = 0.0;
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) deg += vals[k];
    if (deg < 0.0) {
      ++diag.negative_degree_rows;
    } else if (deg < kMinDegree) {
      ++diag.zero_degree_rows;
    } else {
      inv_sqrt[r] = 1.0 / std::sqrt(deg);
    }
  }
  if (diagnostics) *diagnostics = diag;

  std::vector<SparseMatrix::Offset> out_offsets(n + 1, 0);
  std::vector<SparseMatrix::Column> out_cols;
  std::vector<double> out_vals;
  out_cols.reserve(cols.size());
  out_vals.reserve(cols.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      const std::size_t c = cols[k];
      // inv_sqrt[r] * inv_sqrt[c] commutes exactly, so mirrored entries agree.
      const double v = vals[k] * (inv_sqrt[r] * inv_sqrt[c]);
      if (v == 0.0) continue;
      out_cols.push_back(cols[k]);
      out_vals.push_back(v);
    }
    out_offsets[r + 1] = out_cols.size();
  }
  return SparseMatrix::from_csr(n, n, std::move(out_offsets), std::move(out_cols),
                                std::move(out_vals));
}

}  // namespace elr
