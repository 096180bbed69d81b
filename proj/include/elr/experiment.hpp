#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "elr/estimator.hpp"

namespace elr {

nlohmann::json config_to_json(const TrainConfig& cfg);
// Throws ArgumentError on missing or malformed fields.
TrainConfig config_from_json(const nlohmann::json& j);

// One training run. total_seconds covers the whole trainer call, so it is at
// least preprocess_seconds + training_seconds.
struct RunRecord {
  std::string command;
  std::string method;
  std::string dataset;
  TrainConfig config;
  double preprocess_seconds = 0.0;
  double training_seconds = 0.0;
  double total_seconds = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t selected_epoch = 0;
  std::map<std::string, std::string> outputs;
};

nlohmann::json to_json(const RunRecord& r);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

// Zero for an empty input.
MeanStd mean_std(std::span<const double> values);

}  // namespace elr
