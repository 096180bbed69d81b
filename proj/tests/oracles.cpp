#include "oracles.hpp"

#include <algorithm>
#include <numeric>

#include "elr/linalg.hpp"

namespace oracle {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

DenseMatrix dense(const SparseMatrix& a) {
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto c = a.row_cols(r);
    auto v = a.row_values(r);
    for (std::size_t k = 0; k < c.size(); ++k) out(r, c[k]) = v[k];
  }
  return out;
}

SparseMatrix sparse(const DenseMatrix& a) {
  std::vector<SparseMatrix::Offset> off(a.rows() + 1, 0);
  std::vector<SparseMatrix::Column> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) {
        cols.push_back(static_cast<SparseMatrix::Column>(j));
        vals.push_back(a(i, j));
      }
    off[i + 1] = cols.size();
  }
  return SparseMatrix::from_csr(a.rows(), a.cols(), off, cols, vals);
}

DenseMatrix low_rank(const DenseMatrix& u, const std::vector<double>& s) {
  DenseMatrix out(u.rows(), u.rows());
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < u.cols(); ++k) acc += u(i, k) * s[k] * u(j, k);
      out(i, j) = acc;
    }
  return out;
}

std::size_t numerical_rank(const DenseMatrix& a, double tol) {
  const auto dec = elr::full_svd_oracle(a);
  if (dec.values.empty() || dec.values[0] == 0.0) return 0;
  std::size_t r = 0;
  for (double v : dec.values)
    if (v > tol * dec.values[0]) ++r;
  return r;
}

DenseMatrix gcn_probs(const DenseMatrix& x, const DenseMatrix& a_norm, const DenseMatrix& w1,
                      const DenseMatrix& w2) {
  DenseMatrix h = matmul(a_norm, matmul(x, w1));
  for (double& v : h.data()) v = std::max(v, 0.0);
  DenseMatrix logits = matmul(a_norm, matmul(h, w2));
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    double mx = logits(i, 0);
    for (std::size_t c = 1; c < logits.cols(); ++c) mx = std::max(mx, logits(i, c));
    double z = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) z += std::exp(logits(i, c) - mx);
    for (std::size_t c = 0; c < logits.cols(); ++c)
      logits(i, c) = std::exp(logits(i, c) - mx) / z;
  }
  return logits;
}

double gcn_loss(const DenseMatrix& x, const DenseMatrix& a_norm, const DenseMatrix& w1,
                const DenseMatrix& w2, const std::vector<elr::Label>& labels,
                const std::vector<elr::NodeId>& mask, elr::CeMode mode) {
  const DenseMatrix p = gcn_probs(x, a_norm, w1, w2);
  double loss = 0.0;
  for (auto i : mask) loss -= std::log(p(i, static_cast<std::size_t>(labels[i])));
  return mode == elr::CeMode::kMean ? loss / static_cast<double>(mask.size()) : loss;
}

double elr_loss(const ElrLossInputs& in, const DenseMatrix& u, bool* mask_changed) {
  const std::size_t n = u.rows();
  const DenseMatrix ad = low_rank(u, in.s);
  DenseMatrix pruned(n, n);
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool keep = ad(i, j) >= in.epsilon && ad(i, j) != 0.0;
      if (keep != in.support.contains({i, j})) changed = true;
      if (keep) pruned(i, j) = ad(i, j);
    }
  if (mask_changed) *mask_changed = changed;
  DenseMatrix tilde(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) tilde(i, j) = pruned(i, j) * in.inv_sqrt[i] * in.inv_sqrt[j];

  double loss = gcn_loss(*in.x, tilde, in.model->w1, in.model->w2, *in.labels, *in.mask,
                         in.ce_mode);
  const DenseMatrix& target = in.sim_target == elr::SimTarget::kNormalized ? tilde : pruned;
  double sim = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = (*in.a)(i, j) - target(i, j);
      sim += diff * diff;
    }
  double fr = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < u.cols(); ++k) fr += in.s[k] * u(i, k) * u(i, k);
  return loss + in.lambda_sim * sim + in.lambda_fr * fr;
}

double rel_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

SparseMatrix random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<elr::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng))
        edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1.0});
  return elr::build_symmetric(n, edges);
}

DenseMatrix random_symmetric(std::size_t n, double density, bool with_diagonal,
                             std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  std::normal_distribution<double> gauss;
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = with_diagonal ? i : i + 1; j < n; ++j)
      if (coin(rng)) {
        const double v = gauss(rng);
        m(i, j) = v;
        m(j, i) = v;
      }
  return m;
}

DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                         double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = gauss(rng);
  return m;
}

Instance random_instance(std::size_t n, std::size_t features, std::size_t classes, double p,
                         std::mt19937_64& rng) {
  Instance out;
  auto& g = out.graph;
  g.adjacency = random_graph(n, p, rng);
  g.features = random_dense(n, features, rng);
  g.n_classes = classes;
  g.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.labels[i] = static_cast<elr::Label>(i % classes);
  std::vector<elr::NodeId> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);
  // First half train (covers every class when n >= 2·classes), then val, test.
  const std::size_t n_train = n / 2;
  const std::size_t n_val = n / 4;
  out.split.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  out.split.val.assign(order.begin() + static_cast<long>(n_train),
                       order.begin() + static_cast<long>(n_train + n_val));
  out.split.test.assign(order.begin() + static_cast<long>(n_train + n_val), order.end());
  for (auto* part : {&out.split.train, &out.split.val, &out.split.test})
    std::sort(part->begin(), part->end());
  return out;
}

}  // namespace oracle
