#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "elr/matrix.hpp"

namespace elr {

using Label = std::int32_t;
inline constexpr Label kUnlabeled = -1;

// An attributed undirected graph. When identity_features is set, `features`
// holds the materialized N×N identity (featureless datasets).
struct SparseGraph {
  SparseMatrix adjacency;
  DenseMatrix features;
  bool identity_features = false;
  std::vector<Label> labels;
  std::size_t n_classes = 0;

  std::size_t n_nodes() const noexcept { return adjacency.rows(); }
  std::size_t n_features() const noexcept { return features.cols(); }

  // Throws ShapeError/ArgumentError on: non-square or asymmetric adjacency,
  // non-zero diagonal, feature/label row counts != N, labels outside [0, C).
  void validate() const;
};

using NodeId = std::uint32_t;

struct NodeSplit {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;

  // Throws ArgumentError unless the parts are pairwise disjoint, inside
  // [0, n), and train is non-empty.
  void validate(std::size_t n) const;
};

// Uniformly random split: round(train_frac·n) train nodes, round(val_frac·n)
// validation nodes, the rest test. Each part is sorted ascending.
NodeSplit random_split(std::size_t n, double train_frac, double val_frac,
                       std::uint64_t seed);

// Each row scaled to unit L1 norm; all-zero rows are left as is.
DenseMatrix row_normalize(const DenseMatrix& x);

}  // namespace elr
