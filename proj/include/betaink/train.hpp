#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "betaink/seqnet.hpp"

namespace betaink {

enum class TrainMode { Framewise, Fuzzy };

std::string train_mode_name(TrainMode m);
TrainMode train_mode_from_name(const std::string& name);

struct TrainConfig {
  TrainMode mode = TrainMode::Framewise;
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 0.1;
  /// Global gradient-norm clip; <= 0 disables clipping.
  double grad_clip = 5.0;
  double fuzzy_alpha = 0.5;
  double fuzzy_tau = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// One training or test item. `length` is the number of elliptic strokes,
/// used by fuzzy targets. `sequence` is the CTC label; when empty a CTC net
/// scores the single-symbol sequence {label}.
struct Sample {
  Eigen::MatrixXd x;
  int label = 0;
  std::vector<int> sequence;
  int length = 0;
};

struct SoftTarget {
  std::vector<double> dist;
};

/// Soft targets from stroke counts: l_r(c) is the median length of class c,
/// f = softmax(-|l_i - l_r| / tau) and target = alpha * onehot + (1 - alpha) * f,
/// with alpha raised per sample when needed so the true class stays the
/// strict argmax.
std::vector<SoftTarget> fuzzy_targets(std::span<const int> labels, std::span<const int> lengths,
                                      int num_classes, double alpha = 0.5, double tau = 1.0);

std::vector<Target> make_targets(std::span<const Sample> samples, const NetConfig& net,
                                 const TrainConfig& cfg);

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;      // mean training loss with dropout active
  double accuracy = 0.0;  // training accuracy of the same dropout forward passes
  std::size_t skipped = 0;  // CTC samples too short for their label
};

struct TrainResult {
  std::vector<EpochMetrics> log;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mini-batch SGD with global-norm clipping. Per-sample gradients are reduced
/// in a fixed order, so results do not depend on the thread count.
TrainResult train(SeqNet& net, std::span<const Sample> corpus, const TrainConfig& cfg);

/// Fraction of samples whose prediction matches (label, or CTC sequence).
double accuracy(const SeqNet& net, std::span<const Sample> samples);

bool prediction_correct(const SeqNet& net, const Prediction& p, const Sample& s);

}  // namespace betaink
