// Command-line driver: generate datasets, attack graphs, train, evaluate and
// sweep. JSON results go to stdout, progress and errors to stderr.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "elr/attacks.hpp"
#include "elr/checkpoint.hpp"
#include "elr/dataio.hpp"
#include "elr/error.hpp"
#include "elr/estimator.hpp"
#include "elr/experiment.hpp"
#include "elr/synthetic.hpp"

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

void log(const std::string& msg) { std::cerr << "[elr] " << msg << '\n'; }

// Thrown after every config problem has been printed.
struct UsageFailure {};

struct TrainFlags {
  std::string method = "elr";
  std::string variant = "none";
  std::string select = "best";
  std::string sim_target = "normalized";
  bool ce_sum = false;
  bool no_row_normalize = false;
  elr::TrainConfig cfg;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--method", f.method, "elr | gcn | gcn-svd")->capture_default_str();
  cmd->add_option("--d", f.cfg.d, "rank of the low-rank estimate")->capture_default_str();
  cmd->add_option("--epsilon", f.cfg.epsilon, "prune threshold")->capture_default_str();
  cmd->add_option("--lambda-sim", f.cfg.lambda_sim)->capture_default_str();
  cmd->add_option("--lambda-fr", f.cfg.lambda_fr)->capture_default_str();
  cmd->add_option("--u-lr", f.cfg.u_lr, "learning rate of U")->capture_default_str();
  cmd->add_option("--momentum", f.cfg.momentum)->capture_default_str();
  cmd->add_option("--epochs", f.cfg.epochs)->capture_default_str();
  cmd->add_option("--lr", f.cfg.gnn_lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--weight-decay", f.cfg.gnn_weight_decay)->capture_default_str();
  cmd->add_option("--hidden", f.cfg.hidden)->capture_default_str();
  cmd->add_option("--seed", f.cfg.seed)->capture_default_str();
  cmd->add_option("--variant", f.variant,
                  "none | no_sim | no_fr | eps_zero | rand_init | joint_update")
      ->capture_default_str();
  cmd->add_option("--select", f.select, "best | final")->capture_default_str();
  cmd->add_option("--sim-target", f.sim_target, "normalized | pruned")->capture_default_str();
  cmd->add_flag("--ce-sum", f.ce_sum, "sum the cross-entropy instead of averaging");
  cmd->add_flag("--no-row-normalize", f.no_row_normalize, "keep raw feature rows");
}

// Collects every problem before giving up.
elr::Method resolve(TrainFlags& f, std::size_t n_nodes) {
  std::vector<std::string> problems;
  elr::Method method = elr::Method::kElr;
  try {
    method = elr::parse_method(f.method);
  } catch (const elr::Error& e) {
    problems.push_back(e.what());
  }
  try {
    f.cfg.variant = elr::parse_variant(f.variant);
  } catch (const elr::Error& e) {
    problems.push_back(e.what());
  }
  if (f.select != "best" && f.select != "final")
    problems.push_back("--select must be best or final, got '" + f.select + "'");
  if (f.sim_target != "normalized" && f.sim_target != "pruned")
    problems.push_back("--sim-target must be normalized or pruned, got '" + f.sim_target + "'");
  if (f.cfg.variant != elr::Variant::kNone && method != elr::Method::kElr)
    problems.push_back("--variant only applies to --method elr");
  f.cfg.select_best_val = f.select == "best";
  f.cfg.sim_target =
      f.sim_target == "pruned" ? elr::SimTarget::kPruned : elr::SimTarget::kNormalized;
  f.cfg.ce_mode = f.ce_sum ? elr::CeMode::kSum : elr::CeMode::kMean;
  f.cfg.row_normalize_features = !f.no_row_normalize;
  for (auto& p : f.cfg.problems(n_nodes)) problems.push_back(std::move(p));
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "config error: " << p << '\n';
    throw UsageFailure{};
  }
  return method;
}


// ---- attack ----------------------------------------------------------------

struct AttackFlags {
  std::string graph;
  std::size_t n = 0;
  std::string kind = "random";
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string labels;
};

int cmd_attack(const AttackFlags& f) {
  const elr::AttackKind kind = elr::parse_attack(f.kind);
  const elr::SparseMatrix a = elr::load_graph(f.graph, f.n);
  std::vector<elr::Label> labels;
  if (kind == elr::AttackKind::kDice) {
    if (f.labels.empty()) {
      std::cerr << "config error: --kind dice needs --labels\n";
      return kExitUsage;
    }
    labels = elr::load_labels(f.labels, f.n);
  }
  log("attacking " + f.graph + " (" + std::to_string(a.upper_triangle_count()) + " edges)");
  const auto result = elr::apply_attack(a, labels, {kind, f.rate, f.seed});
  elr::save_graph(f.out, result.adjacency);
  const auto rep = elr::perturbation_report(a, result.adjacency);
  json out = {{"kind", f.kind},          {"rate", f.rate},         {"seed", f.seed},
              {"budget", result.budget}, {"spent", result.spent},  {"added", rep.added},
              {"removed", rep.removed},  {"effective_rate", rep.rate}, {"output", f.out}};
  std::cout << out.dump(2) << '\n';
  return result.spent == result.budget ? 0 : kExitError;
}

// ---- train -------------------------------------------------------------------

struct TrainRun {
  elr::RunRecord record;
  elr::Checkpoint checkpoint;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

TrainRun run_training(const elr::Dataset& ds, const elr::SparseGraph& graph, elr::Method method,
                      const elr::TrainConfig& cfg, const std::string& command) {
  const auto start = Clock::now();
  const elr::TrainedModel tm = elr::train_method(method, graph, ds.split, cfg);
  TrainRun run;
  run.record.total_seconds = seconds_since(start);
  run.record.command = command;
  run.record.method = std::string(elr::method_name(method));
  run.record.dataset = ds.manifest.name;
  run.record.config = method == elr::Method::kElr ? elr::ablation_variant(cfg, cfg.variant) : cfg;
  run.record.preprocess_seconds = tm.preprocess_seconds;
  run.record.training_seconds = tm.training_seconds;
  run.record.selected_epoch = tm.selected_epoch;
  const elr::DenseMatrix x = elr::prepare_features(graph, cfg);
  auto acc = [&](const std::vector<elr::NodeId>& part) {
    return part.empty() ? 0.0 : elr::evaluate(tm, x, graph.labels, part);
  };
  run.record.train_accuracy = acc(ds.split.train);
  run.record.val_accuracy = acc(ds.split.val);
  run.record.test_accuracy = acc(ds.split.test);
  run.checkpoint = elr::make_checkpoint(method, cfg, tm, graph, ds.manifest.name);
  return run;
}

struct TrainCmd {
  std::string manifest;
  std::string graph;
  std::string out;
  TrainFlags flags;
};

int cmd_train(TrainCmd& c) {
  elr::Dataset ds = elr::load_dataset(c.manifest);
  if (!c.graph.empty()) ds.graph.adjacency = elr::load_graph(c.graph, ds.manifest.n_nodes);
  const elr::Method method = resolve(c.flags, ds.manifest.n_nodes);
  log("training " + c.flags.method + " on " + ds.manifest.name + " for " +
      std::to_string(c.flags.cfg.epochs) + " epochs");
  TrainRun run = run_training(ds, ds.graph, method, c.flags.cfg, "train");
  elr::save_checkpoint(c.out, run.checkpoint);
  run.record.outputs["checkpoint"] = c.out;
  if (!c.graph.empty()) run.record.outputs["graph"] = c.graph;
  const json record = elr::to_json(run.record);
  std::ofstream(fs::path(c.out) / "run.json") << record.dump(2) << '\n';
  std::cout << record.dump(2) << '\n';
  return 0;
}

// ---- eval --------------------------------------------------------------------

struct EvalCmd {
  std::string checkpoint;
  std::string manifest;
  std::string graph;
  std::string part = "test";
};

int cmd_eval(const EvalCmd& c) {
  const elr::Checkpoint ckpt = elr::load_checkpoint(c.checkpoint);
  elr::Dataset ds = elr::load_dataset(c.manifest);
  if (!c.graph.empty()) ds.graph.adjacency = elr::load_graph(c.graph, ds.manifest.n_nodes);
  std::vector<std::string> problems;
  if (ckpt.n_nodes != ds.graph.n_nodes())
    problems.push_back("N: checkpoint " + std::to_string(ckpt.n_nodes) + ", dataset " +
                       std::to_string(ds.graph.n_nodes()));
  if (ckpt.n_features != ds.graph.n_features())
    problems.push_back("D: checkpoint " + std::to_string(ckpt.n_features) + ", dataset " +
                       std::to_string(ds.graph.n_features()));
  if (ckpt.n_classes != ds.graph.n_classes)
    problems.push_back("C: checkpoint " + std::to_string(ckpt.n_classes) + ", dataset " +
                       std::to_string(ds.graph.n_classes));
  const std::vector<elr::NodeId>* part = nullptr;
  if (c.part == "train") part = &ds.split.train;
  if (c.part == "val") part = &ds.split.val;
  if (c.part == "test") part = &ds.split.test;
  if (!part) problems.push_back("--split-part must be train, val or test");
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "checkpoint/dataset mismatch: " << p << '\n';
    return kExitUsage;
  }
  const elr::SparseMatrix a = elr::checkpoint_adjacency(ckpt, ds.graph.adjacency);
  const elr::DenseMatrix x = elr::prepare_features(ds.graph, ckpt.config);
  const auto trace = elr::gcn_forward(x, a, ckpt.model);
  const double acc = elr::accuracy(trace.probs, ds.graph.labels, *part);
  json out = {{"checkpoint", c.checkpoint}, {"split_part", c.part}, {"accuracy", acc}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---- sweep -------------------------------------------------------------------

struct SweepCmd {
  std::string manifest;
  std::string kind = "random";
  std::vector<double> rates{0.0};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<std::string> methods{"gcn", "elr"};
  std::string out;
  std::string runs_dir;
  TrainFlags flags;
};

int cmd_sweep(SweepCmd& c) {
  const elr::Dataset ds = elr::load_dataset(c.manifest);
  const elr::AttackKind kind = elr::parse_attack(c.kind);
  std::vector<elr::Method> methods;
  for (const auto& m : c.methods) {
    c.flags.method = m;
    methods.push_back(resolve(c.flags, ds.manifest.n_nodes));
  }
  if (!c.runs_dir.empty()) fs::create_directories(c.runs_dir);

  std::ofstream csv(c.out);
  if (!csv) throw elr::FormatError(c.out, 0, "cannot open for writing");
  csv << "method,rate,mean_acc,std_acc,mean_train_s,mean_total_s\n";
  json failures = json::array();
  json rows = json::array();
  for (elr::Method method : methods) {
    for (double rate : c.rates) {
      std::vector<double> acc, train_s, total_s;
      for (std::uint64_t seed : c.seeds) {
        const std::string cell = std::string(elr::method_name(method)) + " rate=" +
                                 std::to_string(rate) + " seed=" + std::to_string(seed);
        try {
          elr::SparseGraph graph = ds.graph;
          graph.adjacency =
              elr::apply_attack(ds.graph.adjacency, ds.graph.labels, {kind, rate, seed}).adjacency;
          elr::TrainConfig cfg = c.flags.cfg;
          cfg.seed = seed;
          log("sweep cell " + cell);
          const TrainRun run = run_training(ds, graph, method, cfg, "sweep");
          acc.push_back(run.record.test_accuracy);
          train_s.push_back(run.record.training_seconds);
          total_s.push_back(run.record.total_seconds);
          if (!c.runs_dir.empty()) {
            json rec = elr::to_json(run.record);
            rec["attack"] = {{"kind", c.kind}, {"rate", rate}};
            const std::string name = std::string(elr::method_name(method)) + "_r" +
                                     std::to_string(rate) + "_s" + std::to_string(seed) +
                                     ".json";
            std::ofstream(fs::path(c.runs_dir) / name) << rec.dump(2) << '\n';
          }
        } catch (const elr::Error& e) {
          log("cell failed: " + cell + ": " + e.what());
          failures.push_back({{"cell", cell}, {"error", e.what()}});
        }
      }
      const auto a = elr::mean_std(acc);
      const auto tr = elr::mean_std(train_s);
      const auto to = elr::mean_std(total_s);
      char line[256];
      std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g,%.17g",
                    std::string(elr::method_name(method)).c_str(), rate, a.mean, a.std, tr.mean,
                    to.mean);
      csv << line << '\n';
      rows.push_back({{"method", elr::method_name(method)},
                      {"rate", rate},
                      {"runs", acc.size()},
                      {"mean_acc", a.mean},
                      {"std_acc", a.std},
                      {"mean_train_s", tr.mean},
                      {"mean_total_s", to.mean}});
    }
  }
  json out = {{"csv", c.out}, {"rows", rows}, {"failures", failures}};
  std::cout << out.dump(2) << '\n';
  return failures.empty() ? 0 : kExitError;
}

// ---- generate ----------------------------------------------------------------

struct GenerateCmd {
  std::string kind = "sbm";
  std::string out;
  std::uint64_t seed = 0;
  std::size_t n = 200;
  std::size_t blocks = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t features = 0;
  std::size_t edges = 5278;
  double train_frac = 0.1;
  double val_frac = 0.1;
};

int cmd_generate(const GenerateCmd& c) {
  elr::SparseGraph g;
  if (c.kind == "sbm") {
    elr::SbmConfig cfg;
    cfg.n = c.n;
    cfg.blocks = c.blocks;
    cfg.p_in = c.p_in;
    cfg.p_out = c.p_out;
    cfg.n_features = c.features;
    cfg.seed = c.seed;
    g = elr::make_sbm(cfg);
  } else if (c.kind == "citation") {
    elr::CitationLikeConfig cfg;
    cfg.n = c.n;
    cfg.classes = c.blocks;
    cfg.n_features = c.features;
    cfg.n_edges = c.edges;
    cfg.seed = c.seed;
    g = elr::make_citation_like(cfg);
  } else {
    std::cerr << "config error: --kind must be sbm or citation\n";
    return kExitUsage;
  }
  const auto split = elr::random_split(g.n_nodes(), c.train_frac, c.val_frac, c.seed);
  const auto manifest = elr::write_dataset(c.out, c.kind + "-" + std::to_string(c.seed), g, split);
  json out = {{"manifest", manifest.string()},
              {"n_nodes", g.n_nodes()},
              {"n_edges", g.adjacency.upper_triangle_count()},
              {"n_features", g.identity_features ? 0 : g.n_features()}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank adjacency estimation for robust GCN training"};
  app.require_subcommand(1);

  AttackFlags attack;
  auto* a = app.add_subcommand("attack", "perturb a graph's edge list");
  a->add_option("--graph", attack.graph, "edge list")->required()->check(CLI::ExistingFile);
  a->add_option("--n", attack.n, "number of nodes")->required();
  a->add_option("--kind", attack.kind, "random | dice")->capture_default_str();
  a->add_option("--rate", attack.rate, "fraction of |E| to perturb")->required();
  a->add_option("--seed", attack.seed)->capture_default_str();
  a->add_option("--out", attack.out, "perturbed edge list")->required();
  a->add_option("--labels", attack.labels, "labels file, required by dice");

  TrainCmd train;
  auto* t = app.add_subcommand("train", "train a model and write a checkpoint");
  t->add_option("--manifest", train.manifest)->required()->check(CLI::ExistingFile);
  t->add_option("--graph", train.graph, "edge list replacing the manifest's");
  t->add_option("--out", train.out, "checkpoint directory")->required();
  add_train_flags(t, train.flags);

  EvalCmd eval;
  auto* e = app.add_subcommand("eval", "accuracy of a checkpoint");
  e->add_option("--checkpoint", eval.checkpoint)->required()->check(CLI::ExistingDirectory);
  e->add_option("--manifest", eval.manifest)->required()->check(CLI::ExistingFile);
  e->add_option("--graph", eval.graph, "edge list replacing the manifest's");
  e->add_option("--split-part", eval.part, "train | val | test")->capture_default_str();

  SweepCmd sweep;
  auto* s = app.add_subcommand("sweep", "attack + train + evaluate over a grid");
  s->add_option("--manifest", sweep.manifest)->required()->check(CLI::ExistingFile);
  s->add_option("--kind", sweep.kind, "random | dice")->capture_default_str();
  s->add_option("--rates", sweep.rates)->delimiter(',');
  s->add_option("--seeds", sweep.seeds)->delimiter(',');
  s->add_option("--methods", sweep.methods)->delimiter(',');
  s->add_option("--out", sweep.out, "CSV table")->required();
  s->add_option("--runs-dir", sweep.runs_dir, "directory for per-run JSON records");
  add_train_flags(s, sweep.flags);

  GenerateCmd gen;
  auto* g = app.add_subcommand("generate", "write a synthetic dataset directory");
  g->add_option("--kind", gen.kind, "sbm | citation")->capture_default_str();
  g->add_option("--out", gen.out, "dataset directory")->required();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--n", gen.n)->capture_default_str();
  g->add_option("--blocks", gen.blocks, "blocks (sbm) or classes (citation)")
      ->capture_default_str();
  g->add_option("--p-in", gen.p_in)->capture_default_str();
  g->add_option("--p-out", gen.p_out)->capture_default_str();
  g->add_option("--features", gen.features, "0 = identity features")->capture_default_str();
  g->add_option("--edges", gen.edges, "edge count (citation)")->capture_default_str();
  g->add_option("--train-frac", gen.train_frac)->capture_default_str();
  g->add_option("--val-frac", gen.val_frac)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    // --help and --version exit 0; every other parse failure is a usage error.
    const int code = app.exit(pe);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (a->parsed()) return cmd_attack(attack);
    if (t->parsed()) return cmd_train(train);
    if (e->parsed()) return cmd_eval(eval);
    if (s->parsed()) return cmd_sweep(sweep);
    if (g->parsed()) return cmd_generate(gen);
  } catch (const UsageFailure&) {
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
