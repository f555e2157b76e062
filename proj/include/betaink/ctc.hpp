#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace betaink {

enum class CtcStatus { Ok, LabelTooLong };

struct CtcResult {
  CtcStatus status = CtcStatus::Ok;
  /// Negative log-likelihood of the label; +inf when no alignment fits.
  double loss = 0.0;
  /// d loss / d activations, where log_probs = log_softmax(activations).
  Eigen::MatrixXd grad;
};

/// Minimum number of frames that can emit `label` (its length plus one blank
/// between each pair of repeated symbols).
int ctc_min_frames(std::span<const int> label);

/// Forward-backward CTC in log space. log_probs is T x (C+1) with the blank
/// in the last column; labels are class indices in [0, C).
CtcResult ctc_loss(const Eigen::MatrixXd& log_probs, std::span<const int> label);

/// Best-path decoding: per-frame argmax, merge repeats, drop blanks.
std::vector<int> ctc_decode(const Eigen::MatrixXd& probs);

}  // namespace betaink
