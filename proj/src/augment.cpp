#include "betaink/augment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace betaink {

void AugmentConfig::validate() const {
  if (!(rotate_deg_max >= 0.0 && rotate_deg_max <= 180.0)) {
    throw std::invalid_argument("rotate_deg_max must lie in [0, 180]");
  }
  if (!(scale_lo > 0.0 && scale_lo <= scale_hi)) {
    throw std::invalid_argument("scale range must satisfy 0 < lo <= hi");
  }
  if (!(translate_frac >= 0.0)) throw std::invalid_argument("translate_frac must be >= 0");
  if (!(jiggle_sigma >= 0.0)) throw std::invalid_argument("jiggle_sigma must be >= 0");
}

BBox bounding_box(const InkTrace& trace) {
  BBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  bool any_down = std::any_of(trace.points.begin(), trace.points.end(),
                              [](const InkPoint& p) { return p.pen == 1; });
  for (const InkPoint& p : trace.points) {
    if (any_down && p.pen == 0) continue;
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  if (trace.points.empty()) return {};
  return b;
}

namespace {

double reference_size(const BBox& b) {
  if (b.height() > 0.0) return b.height();
  return b.width() > 0.0 ? b.width() : 1.0;
}

}  // namespace

AffineDraw draw_affine(const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  AffineDraw d;
  const double r = cfg.rotate_deg_max * std::numbers::pi / 180.0;
  d.rotate_rad = r > 0.0 ? rng.uniform(-r, r) : 0.0;
  d.scale = cfg.scale_hi > cfg.scale_lo ? rng.uniform(cfg.scale_lo, cfg.scale_hi) : cfg.scale_lo;
  if (cfg.translate_frac > 0.0) {
    d.tx = rng.uniform(-cfg.translate_frac, cfg.translate_frac);
    d.ty = rng.uniform(-cfg.translate_frac, cfg.translate_frac);
  }
  d.flip = cfg.flips && rng.uniform() < 0.5;
  return d;
}

InkTrace affine(const InkTrace& trace, const AffineDraw& d) {
  if (d.identity() || trace.points.empty()) return trace;
  const BBox b = bounding_box(trace);
  const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
  const double size = reference_size(b);
  const double c = std::cos(d.rotate_rad) * d.scale, s = std::sin(d.rotate_rad) * d.scale;
  InkTrace out = trace;
  for (InkPoint& p : out.points) {
    double dx = p.x - cx;
    const double dy = p.y - cy;
    if (d.flip) dx = -dx;
    p.x = cx + c * dx - s * dy + d.tx * size;
    p.y = cy + s * dx + c * dy + d.ty * size;
  }
  return out;
}

InkTrace affine(const InkTrace& trace, const AugmentConfig& cfg, Rng& rng) {
  return affine(trace, draw_affine(cfg, rng));
}

InkTrace jiggle(const InkTrace& trace, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("jiggle sigma must be >= 0");
  if (sigma == 0.0 || trace.points.empty()) return trace;
  const double scale = sigma * reference_size(bounding_box(trace));
  constexpr std::array<double, 5> kernel{1.0 / 9, 2.0 / 9, 3.0 / 9, 2.0 / 9, 1.0 / 9};
  InkTrace out = trace;
  for (const PenStroke& run : split_pen_strokes(trace)) {
    const std::size_t n = run.size();
    if (n < 3) continue;
    std::vector<double> nx(n + 4), ny(n + 4);
    for (std::size_t i = 0; i < n + 4; ++i) {
      nx[i] = rng.normal();
      ny[i] = rng.normal();
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double dx = 0.0, dy = 0.0;
      for (std::size_t k = 0; k < kernel.size(); ++k) {
        dx += kernel[k] * nx[i + k];
        dy += kernel[k] * ny[i + k];
      }
      out.points[run.begin + i].x += scale * dx;
      out.points[run.begin + i].y += scale * dy;
    }
  }
  return out;
}

std::vector<InkTrace> expand_corpus(std::span<const InkTrace> corpus, const AugmentConfig& cfg,
                                    int multiplier) {
  if (multiplier < 1) throw std::invalid_argument("multiplier must be >= 1");
  cfg.validate();
  std::vector<InkTrace> out;
  out.reserve(corpus.size() * static_cast<std::size_t>(multiplier));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out.push_back(corpus[i]);
    for (int r = 1; r < multiplier; ++r) {
      Rng rng(derive_seed({cfg.seed, i, static_cast<std::uint64_t>(r)}));
      InkTrace t = affine(corpus[i], cfg, rng);
      t = jiggle(t, cfg.jiggle_sigma, rng);
      t.meta["augmented"] = std::to_string(r);
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace betaink
