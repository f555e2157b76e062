#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaink/features.hpp"
#include "betaink/seqnet.hpp"
#include "betaink/train.hpp"

namespace betaink {

/// A trained recognizer: network, the feature pipeline it expects and the
/// class names its outputs map to.
struct Model {
  SeqNet net;
  Pipeline pipeline = Pipeline::PerceptualBeta;
  FeatureConfig features{};
  std::vector<std::string> classes;
  TrainConfig train{};
  std::vector<EpochMetrics> training_log;
};

/// JSON container, fields in this order:
///   format "betaink.seqnet", version 1,
///   config {input_dim, hidden_sizes, num_classes, use_ctc, dropout_p, seed},
///   pipeline, features {resample_hz, filter_order, filter_ripple_db,
///   filter_cutoff_hz, dehook_arc_fraction, dehook_angle_deg,
///   normalize_height, decimate},
///   classes, train {mode, epochs, batch_size, learning_rate, grad_clip,
///   fuzzy_alpha, fuzzy_tau, seed},
///   parameters (flat, in SeqNet::flatten order),
///   training_log [{epoch, loss, accuracy, skipped}].
nlohmann::ordered_json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

nlohmann::ordered_json net_config_to_json(const NetConfig& c);
NetConfig net_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json feature_config_to_json(const FeatureConfig& c);
FeatureConfig feature_config_from_json(const nlohmann::json& j);

}  // namespace betaink
