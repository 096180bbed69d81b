#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elr/gcn.hpp"
#include "elr/graph.hpp"
#include "elr/linalg.hpp"
#include "elr/matrix.hpp"

namespace elr {

// A_d ≈ ΛΛᵀ with Λ = U·diag(√s). Only `u` is trained; `s` is fixed at
// initialization.
class LowRankFactor {
 public:
  LowRankFactor() = default;
  // Throws ShapeError if s.size() != u.cols(), ArgumentError if any s_k is
  // negative or not finite.
  LowRankFactor(DenseMatrix u, std::vector<double> s);

  std::size_t n_nodes() const noexcept { return u.rows(); }
  std::size_t rank() const noexcept { return u.cols(); }
  const std::vector<double>& s() const noexcept { return s_; }
  const std::vector<double>& sqrt_s() const noexcept { return sqrt_s_; }

  // Λ recomputed from the current u.
  DenseMatrix lambda() const;

  DenseMatrix u;

  bool operator==(const LowRankFactor&) const = default;

 private:
  std::vector<double> s_;
  std::vector<double> sqrt_s_;
};

// Top-d truncated SVD of A, U_d and diag(S_d) stored in the factor.
LowRankFactor coarse_init(const SparseMatrix& a, std::size_t d, const SvdConfig& svd);

inline constexpr std::size_t kDenseCap = 20000;

// Dense ΛΛᵀ. Throws ArgumentError above kDenseCap nodes.
DenseMatrix reconstruct(const LowRankFactor& factor);

// Entries with value >= epsilon, excluding exact zeros. Diagonal entries are
// kept like any other entry.
SparseMatrix prune(const DenseMatrix& a_d, double epsilon);

struct NormalizedEstimate {
  SparseMatrix pruned;            // prune(ΛΛᵀ, ε), unnormalized
  SparseMatrix a_tilde;           // D^{-1/2}·pruned·D^{-1/2}, no self-loops
  std::vector<double> inv_sqrt_degree;
  NormalizeDiagnostics diagnostics;
};

// reconstruct -> prune -> sym_normalize, without materializing the dense
// N×N matrix.
NormalizedEstimate build_normalized_estimate(const LowRankFactor& factor, double epsilon);

// ‖A − B‖²_F over the union of both supports.
double sim_loss(const SparseMatrix& a, const SparseMatrix& b);

// ‖Λ‖²_F = Σ_k s_k·‖u_k‖².
double fr_loss(const LowRankFactor& factor);

// Which matrix the similarity term compares against the input graph.
enum class SimTarget { kNormalized, kPruned };

struct UGradientInputs {
  const SparseMatrix* a = nullptr;  // observed adjacency
  const LowRankFactor* factor = nullptr;
  const NormalizedEstimate* estimate = nullptr;
  const ForwardTrace* trace = nullptr;
  const GcnGradients* grads = nullptr;
  double lambda_sim = 0.0;
  double lambda_fr = 0.0;
  SimTarget sim_target = SimTarget::kNormalized;
};

// ∂(L_CE + λ_sim·L_sim + λ_Fr·L_Fr)/∂U. Pruning acts as a fixed mask and the
// degree scaling is held constant, so with G the gradient with respect to the
// surviving entries of A_d:  ∂L/∂U = (G + Gᵀ)·Λ·diag(√s) + 2λ_Fr·U·diag(s).
DenseMatrix u_gradient(const UGradientInputs& in);

enum class Variant { kNone, kNoSim, kNoFr, kEpsZero, kRandInit, kJointUpdate };

std::string_view variant_name(Variant v);
// Throws ArgumentError listing the accepted names.
Variant parse_variant(std::string_view name);

struct TrainConfig {
  std::size_t d = 16;
  double epsilon = 0.03;
  double lambda_sim = 1e-3;
  double lambda_fr = 1e-2;
  std::size_t epochs = 1000;
  double gnn_lr = 1e-2;
  double gnn_weight_decay = 5e-4;
  double u_lr = 1e-2;
  double momentum = 0.9;
  std::size_t hidden = 16;
  std::uint64_t seed = 0;
  CeMode ce_mode = CeMode::kMean;
  bool select_best_val = true;
  bool row_normalize_features = true;
  SimTarget sim_target = SimTarget::kNormalized;
  std::size_t oversample = 10;
  std::size_t power_iters = 8;
  Variant variant = Variant::kNone;

  // Every problem found, empty when the config is usable on an N-node graph.
  std::vector<std::string> problems(std::size_t n_nodes) const;
};

// Applies the variant's overrides (λ_sim, λ_Fr, ε); rand_init and
// joint_update change trainer behavior and leave the numbers alone.
TrainConfig ablation_variant(TrainConfig cfg, Variant v);

struct EpochRecord {
  double ce = 0.0;
  double sim = 0.0;
  double fr = 0.0;
  double val_accuracy = 0.0;
  std::size_t support = 0;  // stored entries of Ã
};

struct TrainedModel {
  GcnModel model;
  std::optional<LowRankFactor> factor;  // absent for plain GCN
  SparseMatrix a_tilde;                 // adjacency the returned model pairs with
  std::vector<EpochRecord> history;
  std::size_t selected_epoch = 0;
  double val_accuracy = 0.0;
  double preprocess_seconds = 0.0;
  double training_seconds = 0.0;
};

// Input features as the model sees them (row-normalized when configured).
DenseMatrix prepare_features(const SparseGraph& graph, const TrainConfig& cfg);

// Alternating optimization: per epoch one Adam step on Θ with U fixed, then
// one momentum step on U with Θ fixed. Throws NumericError naming the epoch
// if a loss becomes non-finite.
TrainedModel train(const SparseGraph& graph, const NodeSplit& split, const TrainConfig& cfg);

// Low-rank preprocessing only: truncated SVD, prune at ε = 0, normalize, then
// train a GCN on the fixed estimate. Uses cfg.d, the GCN fields and the seed.
TrainedModel svd_baseline_train(const SparseGraph& graph, const NodeSplit& split,
                                const TrainConfig& cfg);

// GCN on D̃^{-1/2}(A + I)D̃^{-1/2}.
TrainedModel gcn_baseline_train(const SparseGraph& graph, const NodeSplit& split,
                                const TrainConfig& cfg);

enum class Method { kElr, kGcn, kGcnSvd };

std::string_view method_name(Method m);
// Accepts "elr", "gcn" and "gcn-svd"; throws ArgumentError otherwise.
Method parse_method(std::string_view name);

TrainedModel train_method(Method m, const SparseGraph& graph, const NodeSplit& split,
                          const TrainConfig& cfg);

// Accuracy of a trained model on a part of the split, with its own Ã.
double evaluate(const TrainedModel& trained, const DenseMatrix& features,
                const std::vector<Label>& labels, std::span<const NodeId> part);

}  // namespace elr
