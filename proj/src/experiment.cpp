#include "elr/experiment.hpp"

#include <cmath>

#include "elr/error.hpp"

namespace elr {

using json = nlohmann::json;

json config_to_json(const TrainConfig& c) {
  return {{"d", c.d},
          {"epsilon", c.epsilon},
          {"lambda_sim", c.lambda_sim},
          {"lambda_fr", c.lambda_fr},
          {"epochs", c.epochs},
          {"gnn_lr", c.gnn_lr},
          {"gnn_weight_decay", c.gnn_weight_decay},
          {"u_lr", c.u_lr},
          {"momentum", c.momentum},
          {"hidden", c.hidden},
          {"seed", c.seed},
          {"ce_mode", c.ce_mode == CeMode::kSum ? "sum" : "mean"},
          {"select", c.select_best_val ? "best" : "final"},
          {"row_normalize_features", c.row_normalize_features},
          {"sim_target", c.sim_target == SimTarget::kPruned ? "pruned" : "normalized"},
          {"oversample", c.oversample},
          {"power_iters", c.power_iters},
          {"variant", std::string(variant_name(c.variant))}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  try {
    c.d = j.at("d").get<std::size_t>();
    c.epsilon = j.at("epsilon").get<double>();
    c.lambda_sim = j.at("lambda_sim").get<double>();
    c.lambda_fr = j.at("lambda_fr").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.gnn_lr = j.at("gnn_lr").get<double>();
    c.gnn_weight_decay = j.at("gnn_weight_decay").get<double>();
    c.u_lr = j.at("u_lr").get<double>();
    c.momentum = j.at("momentum").get<double>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto ce = j.at("ce_mode").get<std::string>();
    const auto select = j.at("select").get<std::string>();
    const auto target = j.at("sim_target").get<std::string>();
    if ((ce != "sum" && ce != "mean") || (select != "best" && select != "final") ||
        (target != "pruned" && target != "normalized"))
      throw ArgumentError("config: unrecognized ce_mode, select or sim_target");
    c.ce_mode = ce == "sum" ? CeMode::kSum : CeMode::kMean;
    c.select_best_val = select == "best";
    c.sim_target = target == "pruned" ? SimTarget::kPruned : SimTarget::kNormalized;
    c.row_normalize_features = j.at("row_normalize_features").get<bool>();
    c.oversample = j.at("oversample").get<std::size_t>();
    c.power_iters = j.at("power_iters").get<std::size_t>();
    c.variant = parse_variant(j.at("variant").get<std::string>());
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  return c;
}

json to_json(const RunRecord& r) {
  return {{"command", r.command},
          {"method", r.method},
          {"dataset", r.dataset},
          {"config", config_to_json(r.config)},
          {"seed", r.config.seed},
          {"preprocess_seconds", r.preprocess_seconds},
          {"training_seconds", r.training_seconds},
          {"total_seconds", r.total_seconds},
          {"train_accuracy", r.train_accuracy},
          {"val_accuracy", r.val_accuracy},
          {"test_accuracy", r.test_accuracy},
          {"selected_epoch", r.selected_epoch},
          {"outputs", r.outputs}};
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

}  // namespace elr
