#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "betaink/ink.hpp"
#include "betaink/random.hpp"

namespace testutil {

using betaink::InkPoint;
using betaink::InkTrace;

inline InkTrace line_trace(double x0, double y0, double x1, double y1, int n, double hz = 100.0) {
  InkTrace t;
  for (int i = 0; i < n; ++i) {
    const double u = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
    t.points.push_back({x0 + u * (x1 - x0), y0 + u * (y1 - y0), i / hz, 1});
  }
  return t;
}

/// Random canonical trace: strictly increasing times, mixed pen states.
inline InkTrace random_trace(betaink::Rng& rng, int n) {
  InkTrace t;
  double time = rng.uniform(0.0, 10.0);
  for (int i = 0; i < n; ++i) {
    time += rng.uniform(0.001, 0.05);
    t.points.push_back({rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3), time,
                        rng.uniform() < 0.8 ? 1 : 0});
  }
  return t;
}

inline double max_abs(const std::vector<double>& v, std::size_t from = 0, std::size_t to = 0) {
  if (to == 0) to = v.size();
  double m = 0.0;
  for (std::size_t i = from; i < to; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil
