#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "betaink/ink.hpp"
#include "betaink/random.hpp"

namespace betaink {

struct AugmentConfig {
  double rotate_deg_max = 10.0;
  double scale_lo = 0.8;
  double scale_hi = 1.2;
  /// Translation bound per axis, as a fraction of the bounding-box height.
  double translate_frac = 0.1;
  /// Jiggle displacement scale, as a fraction of the bounding-box height.
  double jiggle_sigma = 0.01;
  /// Mirror x with probability 1/2.
  bool flips = false;
  std::uint64_t seed = 1;

  void validate() const;
};

struct AffineDraw {
  double rotate_rad = 0.0;
  double scale = 1.0;
  double tx = 0.0;  // fractions of the bounding-box height
  double ty = 0.0;
  bool flip = false;

  bool identity() const {
    return rotate_rad == 0.0 && scale == 1.0 && tx == 0.0 && ty == 0.0 && !flip;
  }
};

AffineDraw draw_affine(const AugmentConfig& cfg, Rng& rng);

/// Flip, rotate and scale about the bounding-box centre, then translate.
/// Timestamps and pen states are untouched; the identity draw returns the
/// input unchanged.
InkTrace affine(const InkTrace& trace, const AffineDraw& draw);
InkTrace affine(const InkTrace& trace, const AugmentConfig& cfg, Rng& rng);

/// Adds i.i.d. Gaussian noise smoothed by the normalized 1-2-3-2-1 kernel
/// within each pen-down run, scaled by sigma * bounding-box height. The first
/// and last point of each run stay fixed.
InkTrace jiggle(const InkTrace& trace, double sigma, Rng& rng);

/// Keeps every original and appends multiplier - 1 replicas of it (affine
/// then jiggle), each drawn from a seed derived from (cfg.seed, index, replica).
std::vector<InkTrace> expand_corpus(std::span<const InkTrace> corpus, const AugmentConfig& cfg,
                                    int multiplier);

/// Bounding box of the pen-down points (all points when none is down).
struct BBox {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};
BBox bounding_box(const InkTrace& trace);

}  // namespace betaink
