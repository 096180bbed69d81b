// Acceptance runner. Each criterion prints exactly one line starting with
// "AC<n> PASS" or "AC<n> FAIL", followed by the measured numbers. Extra
// detail goes to stderr.
//
//   elr_acceptance                 run every criterion
//   elr_acceptance --criterion 3   run one

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "elr/attacks.hpp"
#include "elr/dataio.hpp"
#include "elr/estimator.hpp"
#include "elr/experiment.hpp"
#include "elr/synthetic.hpp"
#include "oracles.hpp"

using namespace elr;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double test_accuracy(const TrainedModel& m, const SparseGraph& g, const NodeSplit& split,
                     const TrainConfig& cfg) {
  return evaluate(m, prepare_features(g, cfg), g.labels, split.test);
}

// ---- shared noisy-SBM protocol (criteria 2 and 8) -----------------------------------

// Evaluation seeds. Hyperparameters below were frozen on seeds 100-104.
constexpr std::uint64_t kSeeds[] = {0, 1, 2, 3, 4};

struct NoisySbm {
  SparseGraph graph;
  NodeSplit split;
};

NoisySbm noisy_sbm(AttackKind kind, double rate, std::uint64_t seed) {
  SbmConfig sbm;
  sbm.seed = seed;
  NoisySbm out;
  out.graph = make_sbm(sbm);
  out.split = random_split(out.graph.n_nodes(), 0.1, 0.1, seed);
  out.graph.adjacency =
      apply_attack(out.graph.adjacency, out.graph.labels, {kind, rate, seed}).adjacency;
  return out;
}

TrainConfig dice_config() {
  TrainConfig cfg;
  cfg.d = 2;
  cfg.epsilon = 0.05;
  cfg.lambda_sim = 1e-3;
  cfg.lambda_fr = 1e-2;
  cfg.u_lr = 1e-2;
  return cfg;
}

TrainConfig random_config() {
  TrainConfig cfg;
  cfg.d = 2;
  cfg.epsilon = 0.12;
  cfg.lambda_sim = 1e-2;
  cfg.lambda_fr = 1e-2;
  cfg.u_lr = 1e-2;
  return cfg;
}

double mean_test(Method method, AttackKind kind, double rate, TrainConfig cfg) {
  double sum = 0.0;
  for (auto seed : kSeeds) {
    const auto data = noisy_sbm(kind, rate, seed);
    cfg.seed = seed;
    const auto m = train_method(method, data.graph, data.split, cfg);
    const double acc = test_accuracy(m, data.graph, data.split, cfg);
    std::fprintf(stderr, "  %s %s rate %.2f seed %llu variant %s: test %.4f\n",
                 std::string(method_name(method)).c_str(),
                 std::string(attack_name(kind)).c_str(), rate,
                 static_cast<unsigned long long>(seed),
                 std::string(variant_name(cfg.variant)).c_str(), acc);
    sum += acc;
  }
  return sum / static_cast<double>(std::size(kSeeds));
}

// ---- criterion 1 ------------------------------------------------------------------------

Outcome clean_cora() {
  fs::path manifest;
  if (const char* env = std::getenv("ELR_CORA_MANIFEST")) manifest = env;
  else manifest = "data/cora/manifest.json";
  if (!fs::exists(manifest))
    return {false, "BLOCKED: Cora dataset not found (set ELR_CORA_MANIFEST or provide " +
                       manifest.string() + ")"};

  const Dataset ds = load_dataset(manifest);
  std::vector<double> gcn, elr;
  double slowest = 0.0;
  for (auto seed : kSeeds) {
    TrainConfig cfg;
    cfg.seed = seed;
    auto t0 = Clock::now();
    const auto g = gcn_baseline_train(ds.graph, ds.split, cfg);
    slowest = std::max(slowest, seconds_since(t0));
    gcn.push_back(100.0 * test_accuracy(g, ds.graph, ds.split, cfg));

    cfg.d = 100;
    cfg.epsilon = 0.01;
    cfg.lambda_sim = 1e-3;
    cfg.lambda_fr = 1e-2;
    cfg.u_lr = 1e-2;
    t0 = Clock::now();
    const auto e = train(ds.graph, ds.split, cfg);
    slowest = std::max(slowest, seconds_since(t0));
    elr.push_back(100.0 * test_accuracy(e, ds.graph, ds.split, cfg));
  }
  const auto g = mean_std(gcn);
  const auto e = mean_std(elr);
  const bool ok = std::abs(g.mean - 83.5) <= 2.0 && std::abs(e.mean - 80.7) <= 2.0 &&
                  slowest <= 600.0;
  return {ok, fmt("gcn %.2f (%.2f) target 83.5+-2.0; elr %.2f (%.2f) target 80.7+-2.0; "
                  "slowest run %.1fs (limit 600s)",
                  g.mean, g.std, e.mean, e.std, slowest)};
}

// ---- criterion 2 ------------------------------------------------------------------------

Outcome robustness() {
  const auto t0 = Clock::now();
  TrainConfig gcn_cfg;
  const double dice_gcn = mean_test(Method::kGcn, AttackKind::kDice, 0.25, gcn_cfg);
  const double dice_elr = mean_test(Method::kElr, AttackKind::kDice, 0.25, dice_config());
  const double rnd_gcn = mean_test(Method::kGcn, AttackKind::kRandom, 1.0, gcn_cfg);
  const double rnd_elr = mean_test(Method::kElr, AttackKind::kRandom, 1.0, random_config());
  const double elapsed = seconds_since(t0);
  const double dice_margin = 100.0 * (dice_elr - dice_gcn);
  const double rnd_margin = 100.0 * (rnd_elr - rnd_gcn);
  const bool ok = dice_margin >= 8.0 && rnd_margin >= 5.0 && elapsed <= 900.0;
  return {ok, fmt("dice 0.25: elr %.2f gcn %.2f margin %.2f (need >= 8); "
                  "random 1.0: elr %.2f gcn %.2f margin %.2f (need >= 5); %.0fs (limit 900s)",
                  100 * dice_elr, 100 * dice_gcn, dice_margin, 100 * rnd_elr, 100 * rnd_gcn,
                  rnd_margin, elapsed)};
}

// ---- criterion 3 ------------------------------------------------------------------------

// Power iterations used here. The default (8) leaves relative errors near
// 1e-3 on spectra with an absolute gap of 0.1, so the criterion's tolerance
// needs a longer subspace iteration.
constexpr std::size_t kAc3PowerIters = 32;

Outcome svd_oracle() {
  std::mt19937_64 rng(2024);
  const std::size_t n = 50;
  const std::size_t d = 10;
  double worst_value = 0.0;
  double worst_recon = 0.0;
  double worst_default = 0.0;
  int made = 0;
  while (made < 20) {
    const double density = made < 10 ? 0.15 : 1.0;
    const DenseMatrix m = oracle::random_symmetric(n, density, true, rng);
    const auto dec = full_svd_oracle(m);
    if (dec.values[d - 1] - dec.values[d] < 0.1) continue;
    const auto sparse = oracle::sparse(m);
    SvdConfig cfg;
    cfg.rank = d;
    cfg.seed = static_cast<std::uint64_t>(made);
    const auto defaults = truncated_svd(sparse, cfg);
    cfg.power_iters = kAc3PowerIters;
    const auto r = truncated_svd(sparse, cfg);
    for (std::size_t k = 0; k < d; ++k) {
      worst_value = std::max(worst_value, oracle::rel_error(r.singular_values[k], dec.values[k]));
      worst_default =
          std::max(worst_default, oracle::rel_error(defaults.singular_values[k], dec.values[k]));
    }
    // Rank-d reconstruction U diag(σ ⊙ sign) Uᵀ, the sign of each pair taken from
    // its Rayleigh quotient (for symmetric A the right vectors are ±U).
    const auto au = oracle::matmul(m, r.singular_vectors);
    std::vector<double> signed_values(d);
    for (std::size_t k = 0; k < d; ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < n; ++i) q += r.singular_vectors(i, k) * au(i, k);
      signed_values[k] = q >= 0.0 ? r.singular_values[k] : -r.singular_values[k];
    }
    const auto approx = oracle::low_rank(r.singular_vectors, signed_values);
    double err = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double diff = m.data()[k] - approx.data()[k];
      err += diff * diff;
    }
    double optimum = 0.0;
    for (std::size_t k = d; k < n; ++k) optimum += dec.values[k] * dec.values[k];
    worst_recon = std::max(worst_recon, std::sqrt(err) / std::sqrt(optimum) - 1.0);
    ++made;
  }
  const bool ok = worst_value <= 1e-6 && worst_recon <= 1e-3;
  return {ok, fmt("20 matrices, power_iters %zu: worst singular-value rel error %.2e "
                  "(limit 1e-6); worst reconstruction excess %.2e (limit 1e-3); "
                  "at default power_iters 8 the worst rel error is %.2e",
                  kAc3PowerIters, worst_value, worst_recon, worst_default)};
}

// ---- criterion 4 ------------------------------------------------------------------------

struct GradWorst {
  double w = 0.0;
  double adj = 0.0;
  double u = 0.0;
  std::size_t u_compared = 0;
  std::size_t u_skipped = 0;
};

void check_gradients(std::uint64_t seed, GradWorst& worst) {
  std::mt19937_64 rng(seed);
  const std::size_t n = 12 + seed % 5;  // 12..16 nodes
  const double h = 1e-6;
  SparseGraph g;
  g.adjacency = oracle::random_graph(n, 0.3, rng);
  g.features = oracle::random_dense(n, 5, rng);
  g.n_classes = 3;
  for (std::size_t i = 0; i < n; ++i) g.labels.push_back(static_cast<Label>(rng() % 3));
  std::vector<NodeId> mask;
  for (NodeId i = 0; i < n; i += 2) mask.push_back(i);
  GcnModel model = GcnModel::glorot(5, 6, 3, rng);
  const LowRankFactor factor(oracle::random_dense(n, 3, rng, 0.4), {3.0, 1.5, 0.8});
  const double eps = 0.05;

  // Θ and Â gradients on the GCN normalization of the graph.
  {
    const auto a_norm = sym_normalize(g.adjacency, true);
    const auto t = gcn_forward(g.features, a_norm, model);
    const auto gr = gcn_backward(t, g.features, a_norm, model, g.labels, mask, CeMode::kMean);
    DenseMatrix dense = oracle::dense(a_norm);
    auto loss = [&] {
      return oracle::gcn_loss(g.features, dense, model.w1, model.w2, g.labels, mask,
                              CeMode::kMean);
    };
    for (DenseMatrix* w : {&model.w1, &model.w2}) {
      const DenseMatrix& an = w == &model.w1 ? gr.w1 : gr.w2;
      for (std::size_t k = 0; k < w->size(); ++k) {
        const double orig = w->data()[k];
        w->data()[k] = orig + h;
        const double up = loss();
        w->data()[k] = orig - h;
        const double down = loss();
        w->data()[k] = orig;
        worst.w = std::max(worst.w, oracle::rel_error(an.data()[k], (up - down) / (2 * h)));
      }
    }
    const auto adj = adjacency_gradient(t, gr, a_norm);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (auto j : a_norm.row_cols(i)) {
        const double orig = dense(i, j);
        dense(i, j) = orig + h;
        const double up = loss();
        dense(i, j) = orig - h;
        const double down = loss();
        dense(i, j) = orig;
        worst.adj = std::max(worst.adj, oracle::rel_error(adj[idx++], (up - down) / (2 * h)));
      }
  }

  // U gradient of the full objective, masked comparison.
  const auto est = build_normalized_estimate(factor, eps);
  const auto t = gcn_forward(g.features, est.a_tilde, model);
  const auto gr = gcn_backward(t, g.features, est.a_tilde, model, g.labels, mask, CeMode::kMean);
  UGradientInputs in{&g.adjacency, &factor, &est, &t, &gr, 0.5, 0.05, SimTarget::kNormalized};
  const auto grad = u_gradient(in);
  const DenseMatrix dense_a = oracle::dense(g.adjacency);
  oracle::ElrLossInputs li;
  li.x = &g.features;
  li.a = &dense_a;
  li.model = &model;
  li.labels = &g.labels;
  li.mask = &mask;
  li.s = factor.s();
  li.inv_sqrt = est.inv_sqrt_degree;
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : est.pruned.row_cols(i)) li.support.insert({i, j});
  li.epsilon = eps;
  li.lambda_sim = 0.5;
  li.lambda_fr = 0.05;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < factor.rank(); ++k) {
      DenseMatrix u = factor.u;
      bool cu = false;
      bool cd = false;
      u(i, k) += h;
      const double up = oracle::elr_loss(li, u, &cu);
      u(i, k) -= 2 * h;
      const double down = oracle::elr_loss(li, u, &cd);
      if (cu || cd) {
        ++worst.u_skipped;
        continue;
      }
      ++worst.u_compared;
      worst.u = std::max(worst.u, oracle::rel_error(grad(i, k), (up - down) / (2 * h)));
    }
}

Outcome gradients() {
  GradWorst worst;
  for (std::uint64_t seed = 0; seed < 5; ++seed) check_gradients(seed, worst);
  const bool ok = worst.w <= 1e-5 && worst.adj <= 1e-4 && worst.u <= 1e-4 && worst.u_compared > 0;
  return {ok, fmt("5 seeds, N 12-16: W1/W2 worst %.2e (limit 1e-5); adjacency worst %.2e "
                  "(limit 1e-4); U worst %.2e over %zu mask-stable entries, %zu skipped "
                  "(limit 1e-4)",
                  worst.w, worst.adj, worst.u, worst.u_compared, worst.u_skipped)};
}

// ---- criterion 5 ------------------------------------------------------------------------

Outcome invariants(const std::string& tests_binary) {
  const std::string cmd = tests_binary + " --gtest_filter='Property.*' --gtest_brief=1 > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  const bool ok = raw != -1 && WIFEXITED(raw) && WEXITSTATUS(raw) == 0;
  return {ok, "property suite (rank <= d, symmetry, frozen singular values, prune support, "
              "CSR well-formedness, serial/parallel agreement), 250 cases each: " +
                  std::string(ok ? "all passed" : "failures, rerun elr_tests --gtest_filter=Property.*")};
}

// ---- criterion 6 ------------------------------------------------------------------------

Outcome reduction() {
  int identical = 0;
  const int runs = 5;
  for (auto seed : kSeeds) {
    const auto data = noisy_sbm(AttackKind::kRandom, 0.5, seed);
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.d = 8;
    cfg.lambda_sim = 0.0;
    cfg.lambda_fr = 0.0;
    cfg.epsilon = 0.0;
    cfg.u_lr = 0.0;
    const auto elr = train(data.graph, data.split, cfg);
    const auto base = svd_baseline_train(data.graph, data.split, cfg);
    if (elr.model == base.model) ++identical;
  }
  return {identical == runs,
          fmt("%d of %d seeds give bit-identical final weights (1000 epochs)", identical, runs)};
}

// ---- criterion 7 ------------------------------------------------------------------------

struct Timed {
  double pre = 0.0;
  double train = 0.0;
  double total = 0.0;
};

Timed timed_run(Method m, const SparseGraph& g, const NodeSplit& split, const TrainConfig& cfg) {
  const auto t0 = Clock::now();
  const auto trained = train_method(m, g, split, cfg);
  Timed t;
  t.total = seconds_since(t0);
  t.pre = trained.preprocess_seconds;
  t.train = trained.training_seconds;
  std::fprintf(stderr, "  %s: preprocess %.2fs training %.2fs total %.2fs test %.4f\n",
               std::string(method_name(m)).c_str(), t.pre, t.train, t.total,
               test_accuracy(trained, g, split, cfg));
  return t;
}

Outcome efficiency() {
  const SparseGraph g = make_citation_like(CitationLikeConfig{});
  const NodeSplit split = random_split(g.n_nodes(), 0.1, 0.1, 0);
  TrainConfig cfg;
  cfg.epochs = 1000;
  cfg.d = 16;
  cfg.epsilon = 0.03;
  cfg.lambda_sim = 1e-2;
  cfg.lambda_fr = 1e-2;
  cfg.u_lr = 1e-3;
  const Timed gcn = timed_run(Method::kGcn, g, split, cfg);
  const Timed elr = timed_run(Method::kElr, g, split, cfg);
  const bool split_ok = gcn.pre >= 0 && gcn.train >= 0 && elr.pre >= 0 && elr.train >= 0 &&
                        gcn.total >= gcn.pre + gcn.train && elr.total >= elr.pre + elr.train;
  const double ratio = elr.total / gcn.total;
  return {split_ok && ratio <= 5.0,
          fmt("N=2708 D=1433 synthetic, 1000 epochs: gcn total %.1fs (train %.1fs), "
              "elr total %.1fs (preprocess %.2fs, train %.1fs), ratio %.2f (limit 5)",
              gcn.total, gcn.train, elr.total, elr.pre, elr.train, ratio)};
}

// ---- criterion 8 ------------------------------------------------------------------------

Outcome ablation() {
  TrainConfig full = dice_config();
  const double acc_full = mean_test(Method::kElr, AttackKind::kDice, 0.25, full);
  TrainConfig rnd = full;
  rnd.variant = Variant::kRandInit;
  const double acc_rand = mean_test(Method::kElr, AttackKind::kDice, 0.25, rnd);
  TrainConfig nosim = full;
  nosim.variant = Variant::kNoSim;
  const double acc_nosim = mean_test(Method::kElr, AttackKind::kDice, 0.25, nosim);
  const double drop_rand = 100.0 * (acc_full - acc_rand);
  const double drop_nosim = 100.0 * (acc_full - acc_nosim);
  return {drop_rand >= 10.0 && drop_nosim > 0.0,
          fmt("dice 0.25: full %.2f, rand_init %.2f (drop %.2f, need >= 10), "
              "no_sim %.2f (drop %.2f, need > 0)",
              100 * acc_full, 100 * acc_rand, drop_rand, 100 * acc_nosim, drop_nosim)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string tests_binary = ELR_TESTS_PATH;
  app.add_option("--criterion", only, "1-8, 0 for all")->check(CLI::Range(0, 8));
  app.add_option("--tests-binary", tests_binary, "unit test executable holding the property suite");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{
      clean_cora, robustness, svd_oracle, gradients,
      [&] { return invariants(tests_binary); }, reduction, efficiency, ablation};
  bool all = true;
  for (int c = 1; c <= 8; ++c) {
    if (only != 0 && c != only) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("AC%d %s %s [%.1fs]\n", c, o.pass ? "PASS" : "FAIL", o.summary.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
