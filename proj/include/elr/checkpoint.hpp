#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "elr/estimator.hpp"

namespace elr {

// Everything needed to rebuild a trained model's predictions from the
// dataset it was trained on.
struct Checkpoint {
  Method method = Method::kElr;
  TrainConfig config;  // after variant overrides
  std::string dataset;
  std::size_t n_nodes = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::size_t selected_epoch = 0;
  double val_accuracy = 0.0;
  GcnModel model;
  std::optional<LowRankFactor> factor;
};

Checkpoint make_checkpoint(Method method, const TrainConfig& cfg, const TrainedModel& trained,
                           const SparseGraph& graph, const std::string& dataset);

// Directory layout: manifest.json plus w1.csv, w2.csv and, with a factor,
// u.csv and s.csv. Values are written with 17 significant digits so they read
// back bit-exactly; the manifest records a SHA-256 per matrix file.
void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);

// Throws FormatError on a missing file, malformed content or a checksum
// mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// The normalized adjacency the checkpointed model pairs with: rebuilt from the
// factor for the low-rank methods, from `adjacency` for plain GCN. Throws
// ArgumentError if the graph size does not match.
SparseMatrix checkpoint_adjacency(const Checkpoint& ckpt, const SparseMatrix& adjacency);

}  // namespace elr
