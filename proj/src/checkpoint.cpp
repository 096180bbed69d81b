#include "elr/checkpoint.hpp"

#include <json.hpp>

#include "dataio_detail.hpp"
#include "elr/dataio.hpp"
#include "elr/error.hpp"
#include "elr/experiment.hpp"

namespace elr {

namespace {

using json = nlohmann::json;

void write_matrix(const fs::path& path, const DenseMatrix& m) { save_features(path, m); }

DenseMatrix read_matrix(const fs::path& path, std::size_t rows, std::size_t cols) {
  DenseMatrix m = load_features(path, rows);
  if (rows > 0 && m.cols() != cols)
    throw FormatError(path.string(), 0,
                      "expected " + std::to_string(cols) + " columns, found " +
                          std::to_string(m.cols()));
  if (rows == 0) return DenseMatrix(0, cols);
  return m;
}

}  // namespace

Checkpoint make_checkpoint(Method method, const TrainConfig& cfg, const TrainedModel& trained,
                           const SparseGraph& graph, const std::string& dataset) {
  Checkpoint c;
  c.method = method;
  c.config = method == Method::kElr ? ablation_variant(cfg, cfg.variant) : cfg;
  c.dataset = dataset;
  c.n_nodes = graph.n_nodes();
  c.n_features = graph.n_features();
  c.n_classes = graph.n_classes;
  c.selected_epoch = trained.selected_epoch;
  c.val_accuracy = trained.val_accuracy;
  c.model = trained.model;
  c.factor = trained.factor;
  return c;
}

void save_checkpoint(const fs::path& dir, const Checkpoint& ckpt) {
  fs::create_directories(dir);
  json files = json::object();
  auto put = [&](const char* name, const DenseMatrix& m) {
    write_matrix(dir / name, m);
    files[name] = sha256_file(dir / name);
  };
  put("w1.csv", ckpt.model.w1);
  put("w2.csv", ckpt.model.w2);
  if (ckpt.factor) {
    put("u.csv", ckpt.factor->u);
    const auto& s = ckpt.factor->s();
    put("s.csv", DenseMatrix(s.size(), 1, s));
  }
  json doc = {{"method", std::string(method_name(ckpt.method))},
              {"config", config_to_json(ckpt.config)},
              {"dataset", ckpt.dataset},
              {"n_nodes", ckpt.n_nodes},
              {"n_features", ckpt.n_features},
              {"n_classes", ckpt.n_classes},
              {"hidden", ckpt.model.hidden_dim()},
              {"rank", ckpt.factor ? ckpt.factor->rank() : 0},
              {"selected_epoch", ckpt.selected_epoch},
              {"val_accuracy", ckpt.val_accuracy},
              {"files", files}};
  auto out = detail::open_output(dir / "manifest.json");
  out << doc.dump(2) << '\n';
  if (!out) throw FormatError((dir / "manifest.json").string(), 0, "write failed");
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.json";
  auto in = detail::open_input(manifest);
  Checkpoint c;
  json files;
  std::size_t hidden = 0;
  std::size_t rank = 0;
  try {
    const json doc = json::parse(in);
    c.method = parse_method(doc.at("method").get<std::string>());
    c.config = config_from_json(doc.at("config"));
    c.dataset = doc.at("dataset").get<std::string>();
    c.n_nodes = doc.at("n_nodes").get<std::size_t>();
    c.n_features = doc.at("n_features").get<std::size_t>();
    c.n_classes = doc.at("n_classes").get<std::size_t>();
    hidden = doc.at("hidden").get<std::size_t>();
    rank = doc.at("rank").get<std::size_t>();
    c.selected_epoch = doc.at("selected_epoch").get<std::size_t>();
    c.val_accuracy = doc.at("val_accuracy").get<double>();
    files = doc.at("files");
  } catch (const json::exception& e) {
    throw FormatError(manifest.string(), 0, std::string("bad checkpoint manifest: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(manifest.string(), 0, e.what());
  }

  auto checked = [&](const char* name) {
    const fs::path p = dir / name;
    if (!files.contains(name)) throw FormatError(manifest.string(), 0, std::string("no entry for ") + name);
    if (sha256_file(p) != files[name].get<std::string>())
      throw FormatError(p.string(), 0, "checksum mismatch");
    return p;
  };
  c.model.w1 = read_matrix(checked("w1.csv"), c.n_features, hidden);
  c.model.w2 = read_matrix(checked("w2.csv"), hidden, c.n_classes);
  if (files.contains("u.csv")) {
    DenseMatrix u = read_matrix(checked("u.csv"), c.n_nodes, rank);
    const DenseMatrix s = read_matrix(checked("s.csv"), rank, 1);
    std::vector<double> sv(s.data().begin(), s.data().end());
    c.factor = LowRankFactor(std::move(u), std::move(sv));
  }
  return c;
}

SparseMatrix checkpoint_adjacency(const Checkpoint& ckpt, const SparseMatrix& adjacency) {
  if (adjacency.rows() != ckpt.n_nodes)
    throw ArgumentError("checkpoint was trained on " + std::to_string(ckpt.n_nodes) +
                        " nodes, graph has " + std::to_string(adjacency.rows()));
  switch (ckpt.method) {
    case Method::kGcn: return sym_normalize(adjacency, true);
    case Method::kGcnSvd:
      if (!ckpt.factor) throw ArgumentError("gcn-svd checkpoint has no factor");
      return build_normalized_estimate(*ckpt.factor, 0.0).a_tilde;
    case Method::kElr: break;
  }
  if (!ckpt.factor) throw ArgumentError("elr checkpoint has no factor");
  return build_normalized_estimate(*ckpt.factor, ckpt.config.epsilon).a_tilde;
}

}  // namespace elr
