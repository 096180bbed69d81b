#include "elr/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "elr/error.hpp"
#include "elr/kernels.hpp"
#include "elr/optim.hpp"

namespace elr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Independent RNG streams derived from the run seed. Θ initialization must
// not depend on whether U is drawn randomly.
constexpr std::uint64_t kSvdStream = 1;
constexpr std::uint64_t kRandInitStream = 2;

SvdConfig svd_config(const TrainConfig& cfg, std::size_t n) {
  SvdConfig svd;
  svd.rank = cfg.d;
  svd.oversample = std::min(cfg.oversample, n > cfg.d ? n - cfg.d : 0);
  svd.power_iters = cfg.power_iters;
  svd.seed = cfg.seed + kSvdStream;
  return svd;
}

LowRankFactor xavier_normal_factor(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(
      0.0, std::sqrt(2.0 / static_cast<double>(n + d)));
  DenseMatrix u(n, d);
  for (double& v : u.data()) v = gauss(rng);
  return LowRankFactor(std::move(u), std::vector<double>(d, 1.0));
}

void check_inputs(const SparseGraph& graph, const NodeSplit& split, const TrainConfig& cfg) {
  graph.validate();
  split.validate(graph.n_nodes());
  const auto problems = cfg.problems(graph.n_nodes());
  if (!problems.empty()) {
    std::string msg = "invalid training config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ArgumentError(msg);
  }
  for (NodeId i : split.train)
    if (graph.labels[i] == kUnlabeled)
      throw ArgumentError("training node " + std::to_string(i) + " is unlabeled");
  if (cfg.select_best_val &&
      std::none_of(split.val.begin(), split.val.end(),
                   [&](NodeId i) { return graph.labels[i] != kUnlabeled; }))
    throw ArgumentError("best-validation selection needs a labeled validation node");
}

// Θ = (W1, W2) with its Adam state.
class ThetaLearner {
 public:
  ThetaLearner(const DenseMatrix& x, const SparseGraph& graph, const NodeSplit& split,
               const TrainConfig& cfg)
      : x_(x), labels_(graph.labels), split_(split), cfg_(cfg) {
    std::mt19937_64 rng(cfg.seed);
    model_ = GcnModel::glorot(x.cols(), cfg.hidden, graph.n_classes, rng);
    adam_.lr = cfg.gnn_lr;
    adam_.weight_decay = cfg.gnn_weight_decay;
  }

  struct Step {
    double ce = 0.0;
    ForwardTrace trace;
    GcnGradients grads;
  };

  // Loss and gradients at the current Θ, then one Adam step.
  Step step(const SparseMatrix& a_norm) {
    Step out = evaluate_with_gradients(a_norm);
    adam_step(model_.w1, out.grads.w1, state_w1_, adam_);
    adam_step(model_.w2, out.grads.w2, state_w2_, adam_);
    return out;
  }

  Step evaluate_with_gradients(const SparseMatrix& a_norm) const {
    Step out;
    out.trace = gcn_forward(x_, a_norm, model_);
    out.ce = cross_entropy(out.trace.probs, labels_, split_.train, cfg_.ce_mode);
    out.grads =
        gcn_backward(out.trace, x_, a_norm, model_, labels_, split_.train, cfg_.ce_mode);
    return out;
  }

  double val_accuracy(const DenseMatrix& probs) const {
    if (split_.val.empty()) return 0.0;
    bool any = std::any_of(split_.val.begin(), split_.val.end(),
                           [&](NodeId i) { return labels_[i] != kUnlabeled; });
    return any ? accuracy(probs, labels_, split_.val) : 0.0;
  }

  const GcnModel& model() const { return model_; }

 private:
  const DenseMatrix& x_;
  const std::vector<Label>& labels_;
  const NodeSplit& split_;
  const TrainConfig& cfg_;
  GcnModel model_;
  AdamConfig adam_;
  AdamState state_w1_;
  AdamState state_w2_;
};

void guard_finite(double value, std::size_t epoch, const char* what) {
  if (!std::isfinite(value))
    throw NumericError(std::string("training diverged: ") + what + " is not finite at epoch " +
                       std::to_string(epoch));
}

// GCN training on a fixed normalized adjacency.
TrainedModel fit_fixed(const DenseMatrix& x, const SparseGraph& graph, const NodeSplit& split,
                       const TrainConfig& cfg, SparseMatrix a_norm) {
  ThetaLearner learner(x, graph, split, cfg);
  TrainedModel out;
  out.a_tilde = std::move(a_norm);
  out.model = learner.model();
  double best = -1.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto st = learner.step(out.a_tilde);
    guard_finite(st.ce, epoch, "cross-entropy");
    const ForwardTrace eval = gcn_forward(x, out.a_tilde, learner.model());
    EpochRecord rec;
    rec.ce = st.ce;
    rec.val_accuracy = learner.val_accuracy(eval.probs);
    rec.support = out.a_tilde.nnz();
    out.history.push_back(rec);
    if (!cfg.select_best_val || rec.val_accuracy > best) {
      best = rec.val_accuracy;
      out.model = learner.model();
      out.selected_epoch = epoch;
      out.val_accuracy = rec.val_accuracy;
    }
  }
  return out;
}

}  // namespace

LowRankFactor::LowRankFactor(DenseMatrix u_in, std::vector<double> s)
    : u(std::move(u_in)), s_(std::move(s)) {
  if (s_.size() != u.cols())
    throw ShapeError("LowRankFactor: " + std::to_string(s_.size()) + " singular values for " +
                     std::to_string(u.cols()) + " columns");
  sqrt_s_.resize(s_.size());
  for (std::size_t k = 0; k < s_.size(); ++k) {
    if (!(s_[k] >= 0.0) || !std::isfinite(s_[k]))
      throw ArgumentError("LowRankFactor: singular value " + std::to_string(k) +
                          " is negative or not finite");
    sqrt_s_[k] = std::sqrt(s_[k]);
  }
}

DenseMatrix LowRankFactor::lambda() const {
  DenseMatrix out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    auto src = u.row(i);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k] * sqrt_s_[k];
  }
  return out;
}

LowRankFactor coarse_init(const SparseMatrix& a, std::size_t d, const SvdConfig& svd) {
  SvdConfig cfg = svd;
  cfg.rank = d;
  auto result = truncated_svd(a, cfg);
  return LowRankFactor(std::move(result.singular_vectors), std::move(result.singular_values));
}

DenseMatrix reconstruct(const LowRankFactor& factor) {
  if (factor.n_nodes() > kDenseCap)
    throw ArgumentError("reconstruct: N = " + std::to_string(factor.n_nodes()) +
                        " exceeds the dense limit of " + std::to_string(kDenseCap) +
                        " nodes");
  return kernels::gram(factor.lambda());
}

SparseMatrix prune(const DenseMatrix& a_d, double epsilon) {
  if (!(epsilon >= 0.0)) throw ArgumentError("prune: epsilon must be >= 0");
  std::vector<SparseMatrix::Offset> offsets(a_d.rows() + 1, 0);
  std::vector<SparseMatrix::Column> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < a_d.rows(); ++i) {
    auto row = a_d.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] >= epsilon && row[j] != 0.0) {
        cols.push_back(static_cast<SparseMatrix::Column>(j));
        vals.push_back(row[j]);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix::from_csr(a_d.rows(), a_d.cols(), std::move(offsets), std::move(cols),
                                std::move(vals));
}

NormalizedEstimate build_normalized_estimate(const LowRankFactor& factor, double epsilon) {
  if (!(epsilon >= 0.0))
    throw ArgumentError("build_normalized_estimate: epsilon must be >= 0");
  NormalizedEstimate out;
  out.pruned = kernels::gram_threshold(factor.lambda(), epsilon);
  out.a_tilde = sym_normalize(out.pruned, false, &out.diagnostics);
  const auto deg = degree_vector(out.pruned);
  out.inv_sqrt_degree.assign(deg.size(), 0.0);
  for (std::size_t i = 0; i < deg.size(); ++i)
    if (deg[i] >= kMinDegree) out.inv_sqrt_degree[i] = 1.0 / std::sqrt(deg[i]);
  return out;
}

double sim_loss(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("sim_loss: shape mismatch");
  double sum = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ac = a.row_cols(r);
    auto av = a.row_values(r);
    auto bc = b.row_cols(r);
    auto bv = b.row_values(r);
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < ac.size() || q < bc.size()) {
      double diff;
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        diff = av[p++];
      } else if (p == ac.size() || bc[q] < ac[p]) {
        diff = -bv[q++];
      } else {
        diff = av[p++] - bv[q++];
      }
      sum += diff * diff;
    }
  }
  return sum;
}

double fr_loss(const LowRankFactor& factor) {
  double sum = 0.0;
  for (std::size_t i = 0; i < factor.n_nodes(); ++i) {
    auto row = factor.u.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) sum += factor.s()[k] * row[k] * row[k];
  }
  return sum;
}

DenseMatrix u_gradient(const UGradientInputs& in) {
  if (!in.a || !in.factor || !in.estimate || !in.trace || !in.grads)
    throw ArgumentError("u_gradient: missing input");
  const SparseMatrix& pattern = in.estimate->pruned;
  const auto& inv = in.estimate->inv_sqrt_degree;
  const LowRankFactor& factor = *in.factor;
  const std::size_t n = factor.n_nodes();
  const std::size_t d = factor.rank();

  // ∂L/∂Ã on the surviving support, mapped to ∂L/∂A_d with fixed degrees.
  std::vector<double> g = adjacency_gradient(*in.trace, *in.grads, pattern);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = pattern.row_cols(i);
    auto vals = pattern.row_values(i);
    const auto base = pattern.row_offsets()[i];
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const std::size_t j = cols[t];
      const double scale = inv[i] * inv[j];
      double gk = g[base + t] * scale;
      if (in.lambda_sim != 0.0) {
        const double observed = in.a->at(i, j);
        if (in.sim_target == SimTarget::kNormalized)
          gk += in.lambda_sim * 2.0 * (vals[t] * scale - observed) * scale;
        else
          gk += in.lambda_sim * 2.0 * (vals[t] - observed);
      }
      g[base + t] = gk;
    }
  }

  // ∂L/∂Λ = (G + Gᵀ)Λ.
  const DenseMatrix lambda = factor.lambda();
  DenseMatrix d_lambda(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = pattern.row_cols(i);
    const auto base = pattern.row_offsets()[i];
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const std::size_t j = cols[t];
      const double gij = g[base + t];
      auto li = lambda.row(i);
      auto lj = lambda.row(j);
      auto di = d_lambda.row(i);
      auto dj = d_lambda.row(j);
      for (std::size_t k = 0; k < d; ++k) {
        di[k] += gij * lj[k];
        dj[k] += gij * li[k];
      }
    }
  }

  DenseMatrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = d_lambda.row(i);
    auto u = factor.u.row(i);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < d; ++k)
      dst[k] = src[k] * factor.sqrt_s()[k] + 2.0 * in.lambda_fr * u[k] * factor.s()[k];
  }
  return out;
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kNone: return "none";
    case Variant::kNoSim: return "no_sim";
    case Variant::kNoFr: return "no_fr";
    case Variant::kEpsZero: return "eps_zero";
    case Variant::kRandInit: return "rand_init";
    case Variant::kJointUpdate: return "joint_update";
  }
  return "none";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kNone, Variant::kNoSim, Variant::kNoFr, Variant::kEpsZero,
                    Variant::kRandInit, Variant::kJointUpdate})
    if (variant_name(v) == name) return v;
  throw ArgumentError("unknown variant '" + std::string(name) +
                      "' (expected none, no_sim, no_fr, eps_zero, rand_init, joint_update)");
}

std::vector<std::string> TrainConfig::problems(std::size_t n_nodes) const {
  std::vector<std::string> out;
  auto nonneg = [&out](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be >= 0");
  };
  if (d < 1) out.push_back("d must be >= 1");
  if (d > n_nodes)
    out.push_back("d = " + std::to_string(d) + " exceeds N = " + std::to_string(n_nodes));
  nonneg(epsilon, "epsilon");
  nonneg(lambda_sim, "lambda_sim");
  nonneg(lambda_fr, "lambda_fr");
  nonneg(gnn_lr, "gnn_lr");
  nonneg(gnn_weight_decay, "gnn_weight_decay");
  nonneg(u_lr, "u_lr");
  nonneg(momentum, "momentum");
  if (hidden < 1) out.push_back("hidden must be >= 1");
  return out;
}

TrainConfig ablation_variant(TrainConfig cfg, Variant v) {
  cfg.variant = v;
  switch (v) {
    case Variant::kNoSim: cfg.lambda_sim = 0.0; break;
    case Variant::kNoFr: cfg.lambda_fr = 0.0; break;
    case Variant::kEpsZero: cfg.epsilon = 0.0; break;
    default: break;
  }
  return cfg;
}

DenseMatrix prepare_features(const SparseGraph& graph, const TrainConfig& cfg) {
  return cfg.row_normalize_features ? row_normalize(graph.features) : graph.features;
}

TrainedModel train(const SparseGraph& graph, const NodeSplit& split, const TrainConfig& base) {
  const TrainConfig cfg = ablation_variant(base, base.variant);
  check_inputs(graph, split, cfg);
  const auto start = Clock::now();
  const DenseMatrix x = prepare_features(graph, cfg);
  const std::size_t n = graph.n_nodes();
  LowRankFactor factor =
      cfg.variant == Variant::kRandInit
          ? xavier_normal_factor(n, cfg.d, cfg.seed + kRandInitStream)
          : coarse_init(graph.adjacency, cfg.d, svd_config(cfg, n));
  TrainedModel out;
  out.preprocess_seconds = seconds_since(start);

  const auto loop_start = Clock::now();
  ThetaLearner learner(x, graph, split, cfg);
  MomentumState momentum;
  out.model = learner.model();
  double best = -1.0;
  const bool joint = cfg.variant == Variant::kJointUpdate;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const NormalizedEstimate est = build_normalized_estimate(factor, cfg.epsilon);
    ThetaLearner::Step theta = learner.step(est.a_tilde);
    guard_finite(theta.ce, epoch, "cross-entropy");

    // Θ has moved; the U step sees Θ fixed at its new value unless the
    // variant asks for both updates from the same forward pass.
    ThetaLearner::Step fresh = learner.evaluate_with_gradients(est.a_tilde);
    const ThetaLearner::Step& for_u = joint ? theta : fresh;

    EpochRecord rec;
    rec.ce = theta.ce;
    rec.sim = sim_loss(graph.adjacency,
                       cfg.sim_target == SimTarget::kNormalized ? est.a_tilde : est.pruned);
    rec.fr = fr_loss(factor);
    rec.val_accuracy = learner.val_accuracy(fresh.trace.probs);
    rec.support = est.a_tilde.nnz();
    guard_finite(rec.sim, epoch, "similarity loss");
    guard_finite(rec.fr, epoch, "Frobenius loss");
    out.history.push_back(rec);

    if (!cfg.select_best_val || rec.val_accuracy > best) {
      best = rec.val_accuracy;
      out.model = learner.model();
      out.factor = factor;
      out.a_tilde = est.a_tilde;
      out.selected_epoch = epoch;
      out.val_accuracy = rec.val_accuracy;
    }

    UGradientInputs in;
    in.a = &graph.adjacency;
    in.factor = &factor;
    in.estimate = &est;
    in.trace = &for_u.trace;
    in.grads = &for_u.grads;
    in.lambda_sim = cfg.lambda_sim;
    in.lambda_fr = cfg.lambda_fr;
    in.sim_target = cfg.sim_target;
    const DenseMatrix grad = u_gradient(in);
    sgd_momentum_step(factor.u, grad, momentum, cfg.u_lr, cfg.momentum);
    if (!factor.u.all_finite())
      throw NumericError("training diverged: U is not finite after epoch " +
                         std::to_string(epoch));
  }
  if (!out.factor) out.factor = factor;
  out.training_seconds = seconds_since(loop_start);
  return out;
}

TrainedModel svd_baseline_train(const SparseGraph& graph, const NodeSplit& split,
                                const TrainConfig& cfg) {
  check_inputs(graph, split, cfg);
  const auto start = Clock::now();
  const DenseMatrix x = prepare_features(graph, cfg);
  LowRankFactor factor = coarse_init(graph.adjacency, cfg.d, svd_config(cfg, graph.n_nodes()));
  NormalizedEstimate est = build_normalized_estimate(factor, 0.0);
  const double pre = seconds_since(start);

  const auto loop_start = Clock::now();
  TrainedModel out = fit_fixed(x, graph, split, cfg, std::move(est.a_tilde));
  out.training_seconds = seconds_since(loop_start);
  out.preprocess_seconds = pre;
  out.factor = std::move(factor);
  return out;
}

TrainedModel gcn_baseline_train(const SparseGraph& graph, const NodeSplit& split,
                                const TrainConfig& cfg) {
  check_inputs(graph, split, cfg);
  const auto start = Clock::now();
  const DenseMatrix x = prepare_features(graph, cfg);
  SparseMatrix a_norm = sym_normalize(graph.adjacency, true);
  const double pre = seconds_since(start);

  const auto loop_start = Clock::now();
  TrainedModel out = fit_fixed(x, graph, split, cfg, std::move(a_norm));
  out.training_seconds = seconds_since(loop_start);
  out.preprocess_seconds = pre;
  return out;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kElr: return "elr";
    case Method::kGcn: return "gcn";
    case Method::kGcnSvd: return "gcn-svd";
  }
  return "elr";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kElr, Method::kGcn, Method::kGcnSvd})
    if (method_name(m) == name) return m;
  throw ArgumentError("unknown method '" + std::string(name) + "' (expected elr, gcn, gcn-svd)");
}

TrainedModel train_method(Method m, const SparseGraph& graph, const NodeSplit& split,
                          const TrainConfig& cfg) {
  switch (m) {
    case Method::kGcn: return gcn_baseline_train(graph, split, cfg);
    case Method::kGcnSvd: return svd_baseline_train(graph, split, cfg);
    case Method::kElr: break;
  }
  return train(graph, split, cfg);
}

double evaluate(const TrainedModel& trained, const DenseMatrix& features,
                const std::vector<Label>& labels, std::span<const NodeId> part) {
  const ForwardTrace trace = gcn_forward(features, trained.a_tilde, trained.model);
  return accuracy(trace.probs, labels, part);
}

}  // namespace elr
