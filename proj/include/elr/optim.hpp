#pragma once

#include <cstdint>

#include "elr/matrix.hpp"

namespace elr {

// Adam with classic L2 regularization: the decay term is added to the
// gradient before the moment updates (not decoupled).
struct AdamConfig {
  double lr = 1e-2;
  double weight_decay = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  DenseMatrix m;
  DenseMatrix v;
  std::uint64_t step = 0;
};

// Updates `param` in place. State buffers are sized lazily on the first call.
// Throws ShapeError if grad or an existing state does not match param.
void adam_step(DenseMatrix& param, const DenseMatrix& grad, AdamState& state,
               const AdamConfig& cfg);

// Heavy-ball momentum: v <- mu*v + g; p <- p - lr*v.
struct MomentumState {
  DenseMatrix velocity;
};

void sgd_momentum_step(DenseMatrix& param, const DenseMatrix& grad, MomentumState& state,
                       double lr, double momentum);

}  // namespace elr
