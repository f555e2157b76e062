#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "betaink/beta_elliptic.hpp"
#include "betaink/random.hpp"

namespace fixtures {

/// K strokes with touching Beta supports, so the speed falls to zero between
/// consecutive strokes. Headings turn by 40-140 degrees at each joint.
inline std::vector<betaink::SynthStroke> chain_strokes(std::uint64_t seed, int k) {
  using namespace betaink;
  Rng rng(seed);
  std::vector<SynthStroke> out;
  double t = 0.0;
  double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < k; ++i) {
    SynthStroke s;
    s.beta.t0 = t;
    s.beta.t1 = t + rng.uniform(0.25, 0.4);
    s.beta.p = rng.uniform(1.8, 3.2);
    s.beta.q = rng.uniform(1.8, 3.2);
    t = s.beta.t1;
    s.arc.a = rng.uniform(0.6, 1.2);
    s.arc.b = s.arc.a * rng.uniform(0.3, 0.9);
    s.direction = rng.uniform() < 0.5 ? 1 : -1;
    const double sweep = rng.uniform(0.6, 1.4);
    // Start the walk where the tangent points along the heading.
    s.arc.theta = 0.0;
    s.arc.arc_start = 0.0;
    const double phi = s.direction > 0 ? rng.uniform(-0.3, 0.3) : std::numbers::pi + rng.uniform(-0.3, 0.3);
    s.arc.arc_start = phi;
    s.arc.theta = heading - (s.direction > 0 ? std::numbers::pi / 2 : -std::numbers::pi / 2) - phi;
    s.beta.amplitude = amplitude_for_sweep(s.beta, s.arc, s.direction * sweep);
    heading += s.direction * sweep + (rng.uniform() < 0.5 ? 1 : -1) * rng.uniform(0.7, 2.4);
    out.push_back(s);
  }
  return out;
}

}  // namespace fixtures

namespace fixtures {

/// Straight strokes along the given headings (degrees), touching in time,
/// each drawn on a flat ellipse so its chord angle equals its heading.
inline std::vector<betaink::SynthStroke> heading_strokes(const std::vector<double>& headings_deg,
                                                         double length = 1.0) {
  using namespace betaink;
  std::vector<SynthStroke> out;
  double t = 0.0;
  for (double h : headings_deg) {
    SynthStroke s;
    s.beta = {t, t + 0.25, 2.0, 2.0, 0.0};
    t += 0.25;
    s.arc.a = length / 2;
    s.arc.b = 1e-3 * length;
    s.arc.theta = h * std::numbers::pi / 180.0;
    s.arc.arc_start = std::numbers::pi;
    s.direction = 1;
    s.beta.amplitude = amplitude_for_sweep(s.beta, s.arc, std::numbers::pi);
    out.push_back(s);
  }
  return out;
}

}  // namespace fixtures
