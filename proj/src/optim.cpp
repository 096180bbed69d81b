#include "elr/optim.hpp"

#include <cmath>

#include "elr/error.hpp"

namespace elr {

namespace {

void check_same(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(what) + ": shape mismatch");
}

}  // namespace

void adam_step(DenseMatrix& param, const DenseMatrix& grad, AdamState& state,
               const AdamConfig& cfg) {
  check_same(param, grad, "adam_step");
  if (state.step == 0 && state.m.empty()) {
    state.m = DenseMatrix(param.rows(), param.cols());
    state.v = DenseMatrix(param.rows(), param.cols());
  }
  check_same(param, state.m, "adam_step state");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);

  auto p = param.data();
  auto g = grad.data();
  auto m = state.m.data();
  auto v = state.v.data();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double gk = g[k] + cfg.weight_decay * p[k];
    m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * gk;
    v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * gk * gk;
    const double m_hat = m[k] / bias1;
    const double v_hat = v[k] / bias2;
    p[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void sgd_momentum_step(DenseMatrix& param, const DenseMatrix& grad, MomentumState& state,
                       double lr, double momentum) {
  check_same(param, grad, "sgd_momentum_step");
  if (state.velocity.empty()) state.velocity = DenseMatrix(param.rows(), param.cols());
  check_same(param, state.velocity, "sgd_momentum_step state");
  auto p = param.data();
  auto g = grad.data();
  auto v = state.velocity.data();
  for (std::size_t k = 0; k < p.size(); ++k) {
    v[k] = momentum * v[k] + g[k];
    p[k] -= lr * v[k];
  }
}

}  // namespace elr
