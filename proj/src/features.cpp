#include "betaink/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace betaink {

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::Raw: return "raw";
    case Pipeline::ThetaEpc: return "theta-epc";
    case Pipeline::Perceptual: return "perceptual";
    case Pipeline::PerceptualBeta: return "perceptual-beta";
  }
  return "?";
}

Pipeline pipeline_from_name(const std::string& name) {
  for (Pipeline p : {Pipeline::Raw, Pipeline::ThetaEpc, Pipeline::Perceptual,
                     Pipeline::PerceptualBeta}) {
    if (pipeline_name(p) == name) return p;
  }
  throw std::invalid_argument("unknown pipeline '" + name +
                              "' (raw|theta-epc|perceptual|perceptual-beta)");
}

int pipeline_input_dim(Pipeline p) {
  switch (p) {
    case Pipeline::Raw: return 3;
    case Pipeline::ThetaEpc: return 8;
    case Pipeline::Perceptual: return 4;
    case Pipeline::PerceptualBeta: return 14;
  }
  return 0;
}

Analysis analyze(const InkTrace& trace, const FeatureConfig& cfg, bool with_beta) {
  Analysis a;
  a.preprocessed = preprocess(trace, cfg.preprocess);
  a.segmentation = segment(a.preprocessed, cfg.segment);
  if (a.segmentation.strokes.empty()) {
    throw FeatureError("no elliptic stroke could be extracted from the trace");
  }
  a.sequence = encode_sequence(a.segmentation.strokes, cfg.regions, with_beta);
  a.sequence.label = trace.label;
  return a;
}

std::array<double, 10> beta_feature_transform(const ElliptiStroke& s, double trace_start) {
  std::array<double, 10> f{};
  if (s.degenerate) return f;
  const auto safe_log = [](double v) { return std::log(std::max(v, 1e-12)); };
  f[0] = safe_log(s.beta.p);
  f[1] = safe_log(s.beta.q);
  f[2] = s.beta.t0 - trace_start;
  f[3] = s.beta.t1 - s.beta.t0;
  f[4] = safe_log(s.beta.amplitude);
  f[5] = safe_log(s.arc.a);
  f[6] = std::log(std::max(s.arc.b, 1e-3));
  f[7] = std::tanh(s.arc.x0);
  f[8] = std::tanh(s.arc.y0);
  f[9] = s.arc.theta;
  for (double& v : f) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return f;
}

Sample features_from_analysis(const Analysis& a, Pipeline pipeline) {
  if (pipeline != Pipeline::Perceptual && pipeline != Pipeline::PerceptualBeta) {
    throw std::invalid_argument("features_from_analysis covers the stroke-level pipelines only");
  }
  const auto& strokes = a.segmentation.strokes;
  const auto& items = a.sequence.items;
  const int dim = pipeline_input_dim(pipeline);
  Sample s;
  s.x.resize(static_cast<Eigen::Index>(items.size()), dim);
  s.length = static_cast<int>(items.size());
  double start = std::numeric_limits<double>::infinity();
  for (const auto& st : strokes) {
    if (!st.degenerate) start = std::min(start, st.beta.t0);
  }
  if (!std::isfinite(start)) start = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int k = 0; k < 4; ++k) s.x(r, k) = items[i].membership.mu[static_cast<std::size_t>(k)];
    if (pipeline == Pipeline::PerceptualBeta) {
      const auto f = beta_feature_transform(strokes[i], start);
      for (int k = 0; k < 10; ++k) s.x(r, 4 + k) = f[static_cast<std::size_t>(k)];
    }
  }
  return s;
}

namespace {

std::vector<std::size_t> decimated_indices(const InkTrace& t, int step) {
  std::vector<std::size_t> keep;
  const auto n = static_cast<std::size_t>(std::max(step, 1));
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    if (i % n == 0 || t.points[i].pen == 0 || i + 1 == t.points.size()) keep.push_back(i);
  }
  return keep;
}

// Stroke whose [m1.t, m3.t] span is closest to time t; -1 when there is none.
int stroke_at(const std::vector<ElliptiStroke>& strokes, double t) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < strokes.size(); ++k) {
    const double lo = strokes[k].points.m1.t, hi = strokes[k].points.m3.t;
    const double d = t < lo ? lo - t : (t > hi ? t - hi : 0.0);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

}  // namespace

Sample featurize(const InkTrace& trace, Pipeline pipeline, const FeatureConfig& cfg) {
  if (pipeline == Pipeline::Perceptual || pipeline == Pipeline::PerceptualBeta) {
    return features_from_analysis(analyze(trace, cfg, pipeline == Pipeline::PerceptualBeta),
                                  pipeline);
  }
  const InkTrace raw = normalize(interpolate(trace, cfg.preprocess), cfg.preprocess);
  const std::vector<std::size_t> keep = decimated_indices(raw, cfg.decimate);
  Sample s;
  s.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()), pipeline_input_dim(pipeline));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const InkPoint& p = raw.points[keep[r]];
    const auto row = static_cast<Eigen::Index>(r);
    s.x(row, 0) = p.x;
    s.x(row, 1) = p.y;
    s.x(row, 2) = p.pen;
  }
  if (pipeline == Pipeline::Raw) {
    s.length = static_cast<int>(keep.size());
    return s;
  }
  const Analysis a = analyze(trace, cfg, false);
  const auto& strokes = a.segmentation.strokes;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const InkPoint& p = raw.points[keep[r]];
    if (p.pen == 0) continue;
    const int k = stroke_at(strokes, p.t);
    if (k < 0) continue;
    const auto row = static_cast<Eigen::Index>(r);
    const auto& item = a.sequence.items[static_cast<std::size_t>(k)];
    s.x(row, 3) = item.degenerate ? 0.0 : item.chord_angle;
    for (int j = 0; j < 4; ++j) s.x(row, 4 + j) = item.membership.mu[static_cast<std::size_t>(j)];
  }
  s.length = static_cast<int>(strokes.size());
  return s;
}

}  // namespace betaink
