#include "betaink/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace betaink {

void PreprocessConfig::validate() const {
  if (!(resample_hz > 0.0)) throw ConfigError("resample_hz must be > 0");
  if (filter_order < 1) throw ConfigError("filter_order must be >= 1");
  if (!(filter_ripple_db > 0.0)) throw ConfigError("filter_ripple_db must be > 0");
  if (!(filter_cutoff_hz > 0.0)) throw ConfigError("filter_cutoff_hz must be > 0");
  if (filter_cutoff_hz >= resample_hz / 2.0) {
    throw ConfigError("filter_cutoff_hz must be below Nyquist (resample_hz / 2)");
  }
  if (!(dehook_arc_fraction > 0.0 && dehook_arc_fraction <= 0.2)) {
    throw ConfigError("dehook_arc_fraction must lie in (0, 0.2]");
  }
  if (!(dehook_angle_deg > 0.0 && dehook_angle_deg < 180.0)) {
    throw ConfigError("dehook_angle_deg must lie in (0, 180)");
  }
  if (!(normalize_height > 0.0)) throw ConfigError("normalize_height must be > 0");
}

namespace {

// Cubic Hermite interpolant with three-point (parabolic) slope estimates on
// a non-uniform knot sequence.
class HermiteChannel {
 public:
  HermiteChannel(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
    const std::size_t n = t_.size();
    m_.assign(n, 0.0);
    if (n == 2) {
      m_[0] = m_[1] = (v_[1] - v_[0]) / (t_[1] - t_[0]);
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = t_[i] - t_[i - 1];
      const double h1 = t_[i + 1] - t_[i];
      const double d0 = (v_[i] - v_[i - 1]) / h0;
      const double d1 = (v_[i + 1] - v_[i]) / h1;
      m_[i] = (h1 * d0 + h0 * d1) / (h0 + h1);
    }
    {
      const double h0 = t_[1] - t_[0];
      const double h1 = t_[2] - t_[1];
      const double d0 = (v_[1] - v_[0]) / h0;
      const double d1 = (v_[2] - v_[1]) / h1;
      m_[0] = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    }
    {
      const double h0 = t_[n - 2] - t_[n - 3];
      const double h1 = t_[n - 1] - t_[n - 2];
      const double d0 = (v_[n - 2] - v_[n - 3]) / h0;
      const double d1 = (v_[n - 1] - v_[n - 2]) / h1;
      m_[n - 1] = ((2.0 * h1 + h0) * d1 - h1 * d0) / (h0 + h1);
    }
  }

  double operator()(double t) const {
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    k = std::min(k, t_.size() - 2);
    const double h = t_[k + 1] - t_[k];
    const double s = (t - t_[k]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v_[k] + (s3 - 2 * s2 + s) * h * m_[k] +
           (-2 * s3 + 3 * s2) * v_[k + 1] + (s3 - s2) * h * m_[k + 1];
  }

 private:
  std::vector<double> t_, v_, m_;
};

std::vector<InkPoint> resample_run(std::span<const InkPoint> run, double hz) {
  if (run.size() < 2) return {run.begin(), run.end()};
  std::vector<double> t, x, y;
  for (const InkPoint& p : run) {
    t.push_back(p.t);
    x.push_back(p.x);
    y.push_back(p.y);
  }
  HermiteChannel fx(t, x), fy(t, y);
  const double t0 = run.front().t;
  const double t1 = run.back().t;
  const double span = t1 - t0;
  const auto steps = std::max<long>(1, std::lround(span * hz));
  std::vector<InkPoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(run.front());
  for (long k = 1; k < steps; ++k) {
    const double tk = t0 + span * static_cast<double>(k) / static_cast<double>(steps);
    out.push_back({fx(tk), fy(tk), tk, 1});
  }
  out.push_back(run.back());
  return out;
}

double angle_between_deg(double ax, double ay, double bx, double by) {
  const double na = std::hypot(ax, ay);
  const double nb = std::hypot(bx, by);
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  const double c = std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// Returns the number of leading points to drop from pts.
std::size_t head_hook_length(const std::vector<InkPoint>& pts, double frac, double angle_deg) {
  const std::size_t n = pts.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    s[i] = s[i - 1] + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
  }
  const double window = frac * s[n - 1];
  if (window <= 0.0) return 0;
  double best = 0.0;
  std::size_t best_j = 0;
  for (std::size_t j = 1; j + 2 < n && s[j] <= window; ++j) {
    std::size_t b = j + 1;
    while (b + 1 < n && s[b] - s[j] < window) ++b;
    const double dev = angle_between_deg(pts[j].x - pts[0].x, pts[j].y - pts[0].y,
                                         pts[b].x - pts[j].x, pts[b].y - pts[j].y);
    if (dev > best) {
      best = dev;
      best_j = j;
    }
  }
  return best > angle_deg ? best_j : 0;
}

std::vector<InkPoint> dehook_run(std::vector<InkPoint> pts, const PreprocessConfig& cfg) {
  if (pts.size() < 4) return pts;
  const std::size_t head = head_hook_length(pts, cfg.dehook_arc_fraction, cfg.dehook_angle_deg);
  std::vector<InkPoint> rev(pts.rbegin(), pts.rend());
  const std::size_t tail = head_hook_length(rev, cfg.dehook_arc_fraction, cfg.dehook_angle_deg);
  if (head + tail + 2 > pts.size()) return pts;
  return {pts.begin() + static_cast<std::ptrdiff_t>(head),
          pts.end() - static_cast<std::ptrdiff_t>(tail)};
}

// Rebuilds a trace by applying fn to each pen-down run; pen-up points are
// copied through untouched.
template <class Fn>
InkTrace map_runs(const InkTrace& trace, Fn&& fn) {
  InkTrace out;
  out.label = trace.label;
  out.meta = trace.meta;
  const auto strokes = split_pen_strokes(trace);
  std::size_t cursor = 0;
  for (const PenStroke& st : strokes) {
    for (; cursor < st.begin; ++cursor) out.points.push_back(trace.points[cursor]);
    auto run = fn(st.points(trace));
    out.points.insert(out.points.end(), run.begin(), run.end());
    cursor = st.end;
  }
  for (; cursor < trace.points.size(); ++cursor) out.points.push_back(trace.points[cursor]);
  return out;
}

}  // namespace

InkTrace interpolate(const InkTrace& trace, const PreprocessConfig& cfg) {
  if (!(cfg.resample_hz > 0.0)) throw ConfigError("resample_hz must be > 0");
  const auto strokes = split_pen_strokes(trace);
  if (strokes.empty()) return trace;
  InkTrace out;
  out.label = trace.label;
  out.meta = trace.meta;
  for (std::size_t k = 0; k < strokes.size(); ++k) {
    if (k > 0) out.points.push_back(trace.points[strokes[k - 1].end]);
    auto run = resample_run(strokes[k].points(trace), cfg.resample_hz);
    out.points.insert(out.points.end(), run.begin(), run.end());
  }
  return out;
}

InkTrace dehook(const InkTrace& trace, const PreprocessConfig& cfg) {
  return map_runs(trace, [&](std::span<const InkPoint> run) {
    return dehook_run(std::vector<InkPoint>(run.begin(), run.end()), cfg);
  });
}

InkTrace lowpass(const InkTrace& trace, const PreprocessConfig& cfg) {
  cfg.validate();
  const SosFilter sos = zpk_to_sos(chebyshev1_lowpass_zpk(
      cfg.filter_order, cfg.filter_ripple_db, cfg.filter_cutoff_hz, cfg.resample_hz));
  return map_runs(trace, [&](std::span<const InkPoint> run) {
    std::vector<double> x, y;
    for (const InkPoint& p : run) {
      x.push_back(p.x);
      y.push_back(p.y);
    }
    const auto fx = filtfilt(sos, x);
    const auto fy = filtfilt(sos, y);
    std::vector<InkPoint> out(run.begin(), run.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].x = fx[i];
      out[i].y = fy[i];
    }
    return out;
  });
}

InkTrace normalize(const InkTrace& trace, const PreprocessConfig& cfg) {
  if (!(cfg.normalize_height > 0.0)) throw ConfigError("normalize_height must be > 0");
  if (trace.points.empty()) return trace;
  const bool any_down = std::any_of(trace.points.begin(), trace.points.end(),
                                    [](const InkPoint& p) { return p.pen == 1; });
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const InkPoint& p : trace.points) {
    if (any_down && p.pen != 1) continue;
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double h = ymax - ymin;
  const double w = xmax - xmin;
  const double tiny = 1e-12 * std::max({1.0, std::abs(cx), std::abs(cy)});
  double scale = 1.0;
  if (h > tiny) {
    scale = cfg.normalize_height / h;
  } else if (w > tiny) {
    scale = cfg.normalize_height / w;
  }
  InkTrace out = trace;
  for (InkPoint& p : out.points) {
    p.x = (p.x - cx) * scale;
    p.y = (p.y - cy) * scale;
  }
  return out;
}

InkTrace preprocess(const InkTrace& trace, const PreprocessConfig& cfg) {
  cfg.validate();
  return normalize(lowpass(dehook(interpolate(trace, cfg), cfg), cfg), cfg);
}

}  // namespace betaink
