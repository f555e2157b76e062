#pragma once

#include <stdexcept>
#include <string>

#include "betaink/beta_elliptic.hpp"
#include "betaink/perceptual.hpp"
#include "betaink/preprocess.hpp"
#include "betaink/train.hpp"

namespace betaink {

/// Input encodings for the sequence classifier.
///  Raw            resampled, normalized (x, y, pen) points, no low-pass; 3 dims
///  ThetaEpc       Raw plus the chord angle and EPC memberships of the stroke
///                 containing each point; 8 dims
///  Perceptual     one step per elliptic stroke, EPC memberships; 4 dims
///  PerceptualBeta Perceptual plus 10 transformed stroke parameters; 14 dims
enum class Pipeline { Raw, ThetaEpc, Perceptual, PerceptualBeta };

std::string pipeline_name(Pipeline p);
Pipeline pipeline_from_name(const std::string& name);
int pipeline_input_dim(Pipeline p);

struct FeatureConfig {
  PreprocessConfig preprocess{};
  SegmentOptions segment{};
  FuzzyRegions regions{};
  /// Keep every n-th point of the point-level pipelines.
  int decimate = 4;
};

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Intermediate results of the stroke-level analysis.
struct Analysis {
  InkTrace preprocessed;
  SegmentResult segmentation;
  PerceptualSequence sequence;
};

/// preprocess -> segment -> encode. Throws FeatureError when no stroke can
/// be extracted.
Analysis analyze(const InkTrace& trace, const FeatureConfig& cfg, bool with_beta = true);

/// ln p, ln q, t0 - trace_start, t1 - t0, ln amplitude, ln a, ln max(b, 1e-3),
/// tanh x0, tanh y0, theta. Degenerate strokes map to zeros.
std::array<double, 10> beta_feature_transform(const ElliptiStroke& s, double trace_start);

/// Features of one trace. Sample::length is the elliptic stroke count (the
/// step count for Raw, which does not segment). Labels are left at 0.
Sample featurize(const InkTrace& trace, Pipeline pipeline, const FeatureConfig& cfg = {});

/// Stroke-level features from an existing analysis. Onsets are taken relative
/// to the earliest Beta onset; pen-up rows of ThetaEpc carry zero memberships.
Sample features_from_analysis(const Analysis& a, Pipeline pipeline);

}  // namespace betaink
