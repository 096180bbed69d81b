#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "elr/graph.hpp"
#include "elr/matrix.hpp"

namespace elr {

// Two-layer GCN: P = softmax(Â · relu(Â · X · W1) · W2).
struct GcnModel {
  DenseMatrix w1;  // D×H
  DenseMatrix w2;  // H×C

  std::size_t in_dim() const noexcept { return w1.rows(); }
  std::size_t hidden_dim() const noexcept { return w1.cols(); }
  std::size_t n_classes() const noexcept { return w2.cols(); }

  // Glorot-uniform initialization: U(−a, a), a = sqrt(6 / (fan_in + fan_out)).
  static GcnModel glorot(std::size_t in_dim, std::size_t hidden, std::size_t classes,
                         std::mt19937_64& rng);

  bool operator==(const GcnModel&) const = default;
};

// Intermediate values of one forward pass, kept for the backward pass.
struct ForwardTrace {
  DenseMatrix xw1;     // X·W1           N×H
  DenseMatrix z1;      // Â·X·W1         N×H (pre-activation)
  DenseMatrix h1;      // relu(z1)       N×H
  DenseMatrix hw2;     // h1·W2          N×C
  DenseMatrix logits;  // Â·h1·W2        N×C
  DenseMatrix probs;   // row softmax    N×C
};

// Throws ShapeError on inconsistent shapes and NumericError naming the layer
// when an activation becomes non-finite.
ForwardTrace gcn_forward(const DenseMatrix& x, const SparseMatrix& a_norm,
                         const GcnModel& model);

enum class CeMode { kMean, kSum };

// Probabilities at or below this are clamped before the log.
inline constexpr double kMinProbability = 1e-15;

// Σ_{i∈mask} −log P[i, y_i], divided by |mask| in kMean mode. `clamped`, when
// given, receives the number of clamped terms. Throws ArgumentError when a
// masked node is unlabeled.
double cross_entropy(const DenseMatrix& probs, std::span<const Label> labels,
                     std::span<const NodeId> mask, CeMode mode,
                     std::size_t* clamped = nullptr);

// Gradients of the cross-entropy. d_z1 and d_logits are the upstream
// gradients at the two propagation steps; they define the adjacency gradient
//   ∂L/∂Â_ij = d_z1[i]·xw1[j] + d_logits[i]·hw2[j],
// which adjacency_gradient() evaluates on a sparse support only.
struct GcnGradients {
  DenseMatrix w1;
  DenseMatrix w2;
  DenseMatrix d_z1;
  DenseMatrix d_logits;
};

// Requires Â symmetric (the transpose products reuse Â). Throws ShapeError if
// the trace does not match the inputs.
GcnGradients gcn_backward(const ForwardTrace& trace, const DenseMatrix& x,
                          const SparseMatrix& a_norm, const GcnModel& model,
                          std::span<const Label> labels, std::span<const NodeId> mask,
                          CeMode mode);

// ∂L/∂Â at every stored entry of `support`, in CSR order.
std::vector<double> adjacency_gradient(const ForwardTrace& trace,
                                       const GcnGradients& grads,
                                       const SparseMatrix& support);

// Argmax class per row (lowest index on ties).
std::vector<Label> predict(const DenseMatrix& probs);

// Fraction of nodes in `part` whose argmax matches the label. Throws
// ArgumentError if `part` contains no labeled node.
double accuracy(const DenseMatrix& probs, std::span<const Label> labels,
                std::span<const NodeId> part);

}  // namespace elr
