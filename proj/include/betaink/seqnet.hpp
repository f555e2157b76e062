#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace betaink {

struct NetConfig {
  int input_dim = 4;
  std::vector<int> hidden_sizes{64};
  int num_classes = 2;
  bool use_ctc = false;
  double dropout_p = 0.5;
  std::uint64_t seed = 1;

  void validate() const;
  /// num_classes, plus one blank column when use_ctc.
  int output_dim() const { return num_classes + (use_ctc ? 1 : 0); }
};

/// Gate blocks are stacked in the order input, forget, cell candidate,
/// output: rows [0,H) input gate, [H,2H) forget, [2H,3H) candidate, [3H,4H) output.
struct LstmLayer {
  Eigen::MatrixXd w;  // 4H x D
  Eigen::MatrixXd u;  // 4H x H
  Eigen::VectorXd b;  // 4H

  int input_dim() const { return static_cast<int>(w.cols()); }
  int hidden() const { return static_cast<int>(u.cols()); }
};

/// Flat parameter order (used by flatten, unflatten and model files): for
/// each layer in order w, u, b, then head_w, head_b. Matrices are row-major.
struct SeqNet {
  NetConfig config;
  std::vector<LstmLayer> layers;
  Eigen::MatrixXd head_w;  // K x H_last
  Eigen::VectorXd head_b;  // K

  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  /// Same shapes, all parameters zero.
  SeqNet zeros_like() const;
  SeqNet& operator+=(const SeqNet& other);
  SeqNet& operator*=(double s);
  double squared_norm() const;
};

/// Seeded initialization: weights uniform in [-0.1, 0.1], biases zero except
/// the forget gate bias, which starts at 1.
SeqNet make_net(const NetConfig& config);

/// Inverted-dropout masks on each layer's output (the connection to the next
/// layer or head). Entry (k, t) is 0 or 1/(1-p).
struct DropoutMasks {
  std::vector<Eigen::MatrixXd> layers;  // H_l x T each
};

DropoutMasks sample_dropout(const SeqNet& net, Eigen::Index steps, std::uint64_t seed);

/// T x output_dim softmax rows. `x` is T x input_dim. Passing masks enables
/// training-mode dropout.
Eigen::MatrixXd forward(const SeqNet& net, const Eigen::MatrixXd& x,
                        const DropoutMasks* masks = nullptr);

/// What a sequence should be scored against. A class target is a one-hot
/// distribution; a soft target is a distribution read at the final step; a CTC
/// target is a label sequence scored over all steps.
struct Target {
  enum class Kind { Class, Soft, Ctc };
  Kind kind = Kind::Class;
  int label = 0;
  std::vector<double> dist;
  std::vector<int> sequence;

  static Target hard(int label);
  static Target soft(std::vector<double> dist);
  static Target ctc(std::vector<int> sequence);
};

struct LossGrad {
  double loss = 0.0;
  bool feasible = true;  // false when a CTC label cannot fit in T steps
  SeqNet grad;
  Eigen::MatrixXd probs;
};

LossGrad loss_and_gradient(const SeqNet& net, const Eigen::MatrixXd& x, const Target& target,
                           const DropoutMasks* masks = nullptr);

double loss_only(const SeqNet& net, const Eigen::MatrixXd& x, const Target& target,
                 const DropoutMasks* masks = nullptr);

struct Prediction {
  int label = -1;                 // classification head
  std::vector<int> sequence;      // CTC head
  double confidence = 0.0;
  double log_confidence = 0.0;
};

/// Classification: argmax of the final-step softmax. CTC: best-path decoding
/// with confidence equal to the product of the per-step maxima.
Prediction predict(const SeqNet& net, const Eigen::MatrixXd& x);

struct GradCheckReport {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t parameters = 0;
};

/// Five-point central differences of the loss against every parameter.
/// Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradCheckReport grad_check(const SeqNet& net, const Eigen::MatrixXd& x, const Target& target,
                           double h = 1e-3, const DropoutMasks* masks = nullptr);

}  // namespace betaink
