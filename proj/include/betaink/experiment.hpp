#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaink/augment.hpp"
#include "betaink/features.hpp"
#include "betaink/model_io.hpp"
#include "betaink/noise.hpp"
#include "betaink/seqnet.hpp"
#include "betaink/train.hpp"

namespace betaink {

struct ExperimentConfig {
  Pipeline pipeline = Pipeline::PerceptualBeta;
  /// input_dim and num_classes are filled in from the pipeline and classes.
  NetConfig net{};
  TrainConfig train{};
  FeatureConfig features{};
  /// Fraction of each class used for training (stratified).
  double split = 0.8;
  /// Training-set size multiplier (1 disables augmentation).
  int augment_multiplier = 1;
  AugmentConfig augment{};
  std::optional<NoiseSpec> noise;
  /// Seeds the split and the noise draws.
  std::uint64_t seed = 1;
};

struct EvalReport {
  std::string pipeline;
  std::string mode;
  std::vector<std::string> classes;
  double recognition_rate = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<double> per_class_rates;
  std::size_t train_size = 0;  // after augmentation
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config;
  std::vector<EpochMetrics> training_log;
};

/// Seeded stratified split into (train, test) indices, each sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    std::span<const InkTrace> corpus, const std::vector<std::string>& classes, double split,
    std::uint64_t seed);

/// split -> augment train -> noise -> featurize -> train -> evaluate.
/// Throws when a class has no training sample.
EvalReport run_experiment(std::span<const InkTrace> corpus, const std::vector<std::string>& classes,
                          const ExperimentConfig& cfg, Model* trained = nullptr);

/// Scores a trained model on a labelled corpus.
EvalReport evaluate(const Model& model, std::span<const InkTrace> corpus);

nlohmann::ordered_json experiment_config_to_json(const ExperimentConfig& cfg);
nlohmann::ordered_json report_to_json(const EvalReport& r);
/// Deterministic serialization (fixed key order, round-trip doubles).
std::string report_string(const EvalReport& r);

}  // namespace betaink
