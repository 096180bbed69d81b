#include "elr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "elr/error.hpp"

namespace elr {

void SparseGraph::validate() const {
  if (!adjacency.is_square()) throw ShapeError("graph: adjacency is not square");
  if (!adjacency.is_symmetric()) throw ShapeError("graph: adjacency is not symmetric");
  if (!adjacency.has_zero_diagonal())
    throw ShapeError("graph: adjacency has self-loops");
  const std::size_t n = n_nodes();
  if (features.rows() != n)
    throw ShapeError("graph: feature rows " + std::to_string(features.rows()) +
                     " != nodes " + std::to_string(n));
  if (labels.size() != n)
    throw ShapeError("graph: label count " + std::to_string(labels.size()) +
                     " != nodes " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Label y = labels[i];
    if (y == kUnlabeled) continue;
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes)
      throw ArgumentError("graph: node " + std::to_string(i) + " has label " +
                          std::to_string(y) + " outside [0, " +
                          std::to_string(n_classes) + ")");
  }
}

void NodeSplit::validate(std::size_t n) const {
  if (train.empty()) throw ArgumentError("split: train part is empty");
  std::vector<char> seen(n, 0);
  auto mark = [&](const std::vector<NodeId>& part, const char* name) {
    for (NodeId id : part) {
      if (id >= n)
        throw ArgumentError(std::string("split: ") + name + " node " +
                            std::to_string(id) + " >= n=" + std::to_string(n));
      if (seen[id])
        throw ArgumentError(std::string("split: node ") + std::to_string(id) +
                            " appears more than once (" + name + ")");
      seen[id] = 1;
    }
  };
  mark(train, "train");
  mark(val, "val");
  mark(test, "test");
}

NodeSplit random_split(std::size_t n, double train_frac, double val_frac,
                       std::uint64_t seed) {
  if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0)
    throw ArgumentError("random_split: invalid fractions");
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_frac * n));
  const auto n_val = static_cast<std::size_t>(std::llround(val_frac * n));
  NodeSplit split;
  split.train.assign(perm.begin(), perm.begin() + n_train);
  split.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  split.test.assign(perm.begin() + n_train + n_val, perm.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

DenseMatrix row_normalize(const DenseMatrix& x) {
  DenseMatrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double sum = 0.0;
    for (double v : row) sum += std::abs(v);
    if (sum == 0.0) continue;
    for (double& v : row) v /= sum;
  }
  return out;
}

}  // namespace elr
