#include "elr/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "elr/error.hpp"
#include "elr/kernels.hpp"

namespace elr {

namespace {

void require_finite(const DenseMatrix& m, const char* layer) {
  if (!m.all_finite())
    throw NumericError(std::string("gcn_forward: non-finite values in ") + layer);
}

void softmax_rows(const DenseMatrix& logits, DenseMatrix& probs) {
  probs = DenseMatrix(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto out = probs.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - mx);
      sum += out[c];
    }
    for (double& p : out) p /= sum;
  }
}

}  // namespace

GcnModel GcnModel::glorot(std::size_t in_dim, std::size_t hidden, std::size_t classes,
                          std::mt19937_64& rng) {
  auto init = [&rng](std::size_t fan_in, std::size_t fan_out) {
    DenseMatrix w(fan_in, fan_out);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : w.data()) v = dist(rng);
    return w;
  };
  GcnModel model;
  model.w1 = init(in_dim, hidden);
  model.w2 = init(hidden, classes);
  return model;
}

ForwardTrace gcn_forward(const DenseMatrix& x, const SparseMatrix& a_norm,
                         const GcnModel& model) {
  const std::size_t n = x.rows();
  if (a_norm.rows() != n || a_norm.cols() != n)
    throw ShapeError("gcn_forward: adjacency is " + std::to_string(a_norm.rows()) + "x" +
                     std::to_string(a_norm.cols()) + ", expected " + std::to_string(n) +
                     "x" + std::to_string(n));
  if (x.cols() != model.w1.rows())
    throw ShapeError("gcn_forward: feature dim " + std::to_string(x.cols()) +
                     " != W1 rows " + std::to_string(model.w1.rows()));
  if (model.w1.cols() != model.w2.rows())
    throw ShapeError("gcn_forward: W1/W2 hidden dims disagree");

  ForwardTrace t;
  t.xw1 = kernels::gemm(x, model.w1);
  t.z1 = kernels::spmm(a_norm, t.xw1);
  require_finite(t.z1, "layer 1");
  t.h1 = t.z1;
  for (double& v : t.h1.data()) v = v > 0.0 ? v : 0.0;
  t.hw2 = kernels::gemm(t.h1, model.w2);
  t.logits = kernels::spmm(a_norm, t.hw2);
  require_finite(t.logits, "layer 2");
  softmax_rows(t.logits, t.probs);
  return t;
}

double cross_entropy(const DenseMatrix& probs, std::span<const Label> labels,
                     std::span<const NodeId> mask, CeMode mode, std::size_t* clamped) {
  double loss = 0.0;
  std::size_t n_clamped = 0;
  for (NodeId i : mask) {
    const Label y = labels[i];
    if (y == kUnlabeled)
      throw ArgumentError("cross_entropy: node " + std::to_string(i) + " is unlabeled");
    double p = probs(i, static_cast<std::size_t>(y));
    if (p <= kMinProbability) {
      p = kMinProbability;
      ++n_clamped;
    }
    loss -= std::log(p);
  }
  if (clamped) *clamped = n_clamped;
  if (mode == CeMode::kMean && !mask.empty()) loss /= static_cast<double>(mask.size());
  return loss;
}

GcnGradients gcn_backward(const ForwardTrace& trace, const DenseMatrix& x,
                          const SparseMatrix& a_norm, const GcnModel& model,
                          std::span<const Label> labels, std::span<const NodeId> mask,
                          CeMode mode) {
  const std::size_t n = x.rows();
  const std::size_t c = model.n_classes();
  if (trace.probs.rows() != n || trace.probs.cols() != c ||
      trace.xw1.cols() != model.hidden_dim() || a_norm.rows() != n)
    throw ShapeError("gcn_backward: trace does not match inputs");

  GcnGradients g;
  g.d_logits = DenseMatrix(n, c);
  const double scale =
      mode == CeMode::kMean && !mask.empty() ? 1.0 / static_cast<double>(mask.size()) : 1.0;
  for (NodeId i : mask) {
    const Label y = labels[i];
    if (y == kUnlabeled)
      throw ArgumentError("gcn_backward: node " + std::to_string(i) + " is unlabeled");
    auto dst = g.d_logits.row(i);
    auto p = trace.probs.row(i);
    for (std::size_t k = 0; k < c; ++k) dst[k] += scale * p[k];
    dst[static_cast<std::size_t>(y)] -= scale;
  }

  // logits = Â·hw2, Â symmetric.
  const DenseMatrix d_hw2 = kernels::spmm(a_norm, g.d_logits);
  g.w2 = kernels::gemm_tn(trace.h1, d_hw2);
  DenseMatrix d_h1 = kernels::gemm_nt(d_hw2, model.w2);
  g.d_z1 = std::move(d_h1);
  auto dz = g.d_z1.data();
  auto z = trace.z1.data();
  for (std::size_t k = 0; k < dz.size(); ++k)
    if (!(z[k] > 0.0)) dz[k] = 0.0;

  const DenseMatrix d_xw1 = kernels::spmm(a_norm, g.d_z1);
  g.w1 = kernels::gemm_tn(x, d_xw1);
  return g;
}

std::vector<double> adjacency_gradient(const ForwardTrace& trace,
                                       const GcnGradients& grads,
                                       const SparseMatrix& support) {
  auto first = kernels::pattern_dots(support, grads.d_z1, trace.xw1);
  const auto second = kernels::pattern_dots(support, grads.d_logits, trace.hw2);
  for (std::size_t k = 0; k < first.size(); ++k) first[k] += second[k];
  return first;
}

std::vector<Label> predict(const DenseMatrix& probs) {
  std::vector<Label> out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    auto row = probs.row(i);
    out[i] = static_cast<Label>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

double accuracy(const DenseMatrix& probs, std::span<const Label> labels,
                std::span<const NodeId> part) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (NodeId i : part) {
    if (labels[i] == kUnlabeled) continue;
    ++total;
    auto row = probs.row(i);
    const auto guess = std::max_element(row.begin(), row.end()) - row.begin();
    if (guess == labels[i]) ++correct;
  }
  if (total == 0) throw ArgumentError("accuracy: no labeled node in the requested part");
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace elr
