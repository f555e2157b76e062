#include <algorithm>
#include <cmath>

#include "betaink/beta_elliptic.hpp"

namespace betaink {

namespace {

std::size_t auto_window(std::span<const InkPoint> run) {
  std::vector<double> dts;
  for (std::size_t i = 1; i < run.size(); ++i) dts.push_back(run[i].t - run[i - 1].t);
  std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2), dts.end());
  const double dt = dts[dts.size() / 2];
  if (!(dt > 0.0)) return 1;
  return static_cast<std::size_t>(std::max(1L, std::lround(1.0 / dt / 20.0)));
}

std::vector<double> moving_average(const std::vector<VelocitySample>& v, std::size_t window) {
  const std::size_t n = v.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) acc += v[k].v;
    out[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

double valley_prominence(const std::vector<double>& s, std::size_t m) {
  double left = s[m];
  for (std::size_t k = m + 1; k-- > 0;) {
    if (s[k] < s[m]) break;
    left = std::max(left, s[k]);
  }
  double right = s[m];
  for (std::size_t k = m; k < s.size(); ++k) {
    if (s[k] < s[m]) break;
    right = std::max(right, s[k]);
  }
  return std::min(left, right) - s[m];
}

BetaPoint make_point(std::span<const InkPoint> run, std::size_t local, std::size_t offset) {
  return {local + offset, run[local].x, run[local].y, run[local].t};
}

ElliptiStroke degenerate_stroke(std::span<const InkPoint> run, std::size_t offset,
                                std::size_t pen_stroke) {
  ElliptiStroke st;
  st.degenerate = true;
  st.pen_stroke = pen_stroke;
  const std::size_t last = run.size() - 1;
  st.points.m1 = make_point(run, 0, offset);
  st.points.m3 = make_point(run, last, offset);
  st.points.m2 = make_point(run, last / 2, offset);
  st.points.h = st.points.m2;
  st.beta.t0 = run.front().t;
  st.beta.t1 = run.back().t > run.front().t ? run.back().t : run.front().t + 1e-3;
  st.beta.amplitude = 0.0;
  const ArcFit fit = fit_arc({}, st.points);
  st.arc = fit.arc;
  st.arc_method = fit.method;
  st.chord_angle = fit.arc.theta;
  return st;
}

}  // namespace

std::vector<std::size_t> velocity_boundaries(std::span<const InkPoint> run,
                                             const SegmentOptions& opts) {
  const std::size_t n = run.size();
  if (n == 0) return {};
  if (n < 3) return {0, n - 1};
  const auto vel = curvilinear_velocity(run);
  std::size_t window = opts.smoothing_window ? opts.smoothing_window : auto_window(run);
  if (window % 2 == 0) ++window;
  const auto sm = moving_average(vel, window);
  const double peak = *std::max_element(sm.begin(), sm.end());

  std::vector<std::size_t> cuts{0};
  if (peak > 0.0) {
    std::size_t i = 1;
    while (i + 1 < n) {
      std::size_t j = i;
      while (j + 1 < n && sm[j + 1] == sm[i]) ++j;
      if (j + 1 < n && sm[i - 1] > sm[i] && sm[j + 1] > sm[i]) {
        const std::size_t m = (i + j) / 2;
        if (valley_prominence(sm, m) >= opts.prominence * peak) {
          // Snap to the raw speed minimum near the smoothed valley.
          const std::size_t lo = std::max<std::size_t>(1, m > window / 2 ? m - window / 2 : 1);
          const std::size_t hi = std::min(n - 2, m + window / 2);
          std::size_t best = m;
          for (std::size_t k = lo; k <= hi; ++k) {
            if (vel[k].v < vel[best].v) best = k;
          }
          if (best > cuts.back()) cuts.push_back(best);
        }
      }
      i = j + 1;
    }
  }
  if (cuts.back() != n - 1) cuts.push_back(n - 1);

  // Fold pieces shorter than min_points into a neighbour by dropping the
  // faster of their two boundaries.
  for (;;) {
    if (cuts.size() <= 2) break;
    std::size_t short_piece = cuts.size();
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] - cuts[k] + 1 < opts.min_points) {
        short_piece = k;
        break;
      }
    }
    if (short_piece == cuts.size()) break;
    std::size_t drop;
    if (short_piece == 0) {
      drop = 1;
    } else if (short_piece + 2 == cuts.size()) {
      drop = short_piece;
    } else {
      drop = vel[cuts[short_piece]].v >= vel[cuts[short_piece + 1]].v ? short_piece : short_piece + 1;
    }
    cuts.erase(cuts.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return cuts;
}

SegmentResult segment(const InkTrace& trace, const SegmentOptions& opts) {
  SegmentResult out;
  const auto runs = split_pen_strokes(trace);
  for (std::size_t ps = 0; ps < runs.size(); ++ps) {
    const auto run = runs[ps].points(trace);
    const std::size_t offset = runs[ps].begin;
    const bool still = std::all_of(run.begin(), run.end(), [&](const InkPoint& p) {
      return p.x == run.front().x && p.y == run.front().y;
    });
    if (still) {
      out.warnings.push_back("pen stroke " + std::to_string(ps) +
                             ": all points coincide, skipped");
      continue;
    }
    if (run.size() < 3) {
      out.strokes.push_back(degenerate_stroke(run, offset, ps));
      out.warnings.push_back("pen stroke " + std::to_string(ps) + ": fewer than 3 points");
      continue;
    }
    const auto vel = curvilinear_velocity(run);
    const auto cuts = velocity_boundaries(run, opts);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const std::size_t b0 = cuts[k], b1 = cuts[k + 1];
      ElliptiStroke st;
      st.pen_stroke = ps;
      std::size_t m2 = (b0 + b1) / 2;
      for (std::size_t i = b0 + 1; i < b1; ++i) {
        if (vel[i].v > vel[m2].v) m2 = i;
      }
      st.points.m1 = make_point(run, b0, offset);
      st.points.m2 = make_point(run, m2, offset);
      st.points.m3 = make_point(run, b1, offset);
      {
        const double cx = st.points.m3.x - st.points.m1.x;
        const double cy = st.points.m3.y - st.points.m1.y;
        const double len2 = cx * cx + cy * cy;
        double u = 0.0;
        if (len2 > 0.0) {
          u = ((st.points.m2.x - st.points.m1.x) * cx + (st.points.m2.y - st.points.m1.y) * cy) / len2;
          u = std::clamp(u, 0.0, 1.0);
        }
        st.points.h = st.points.m2;
        st.points.h.x = st.points.m1.x + u * cx;
        st.points.h.y = st.points.m1.y + u * cy;
      }
      try {
        BetaFitOptions fo = opts.beta_fit;
        const double spacing = (run[b1].t - run[b0].t) / static_cast<double>(b1 - b0);
        if (fo.support_slack <= 0.0 && opts.support_slack_samples > 0.0) {
          fo.support_slack = opts.support_slack_samples * spacing;
        }
        if (fo.difference_half_width <= 0.0 && opts.difference_model) fo.difference_half_width = spacing;
        st.beta = fit_beta(std::span<const VelocitySample>(vel).subspan(b0, b1 - b0 + 1),
                           run[b0].t, run[b1].t, fo);
      } catch (const std::exception& e) {
        st.degenerate = true;
        st.beta = BetaProfile{run[b0].t, run[b1].t, 2.0, 2.0, 0.0};
        out.warnings.push_back("pen stroke " + std::to_string(ps) + " piece " + std::to_string(k) +
                               ": " + e.what());
      }
      std::vector<Point2> pts;
      pts.reserve(b1 - b0 + 1);
      for (std::size_t i = b0; i <= b1; ++i) pts.push_back({run[i].x, run[i].y});
      const ArcFit fit = fit_arc(pts, st.points);
      st.arc = fit.arc;
      st.arc_method = fit.method;
      const bool closed = st.points.m1.x == st.points.m3.x && st.points.m1.y == st.points.m3.y;
      st.chord_angle = closed ? st.arc.theta
                              : deviation_angle(st.points.m1.x, st.points.m1.y, st.points.m3.x,
                                                st.points.m3.y);
      out.strokes.push_back(st);
    }
  }
  return out;
}

}  // namespace betaink
