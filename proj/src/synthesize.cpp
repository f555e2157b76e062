#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "betaink/beta_elliptic.hpp"

namespace betaink {

namespace {

// Arc-length parametrization of one stroke's path: walks the ellipse from
// arc_start in the stroke's direction.
class ArcWalker {
 public:
  ArcWalker(const EllipticArc& arc, int direction, double total_length)
      : arc_(arc), dir_(direction >= 0 ? 1.0 : -1.0) {
    const double step = std::numbers::pi / 256.0;
    psi_.push_back(0.0);
    len_.push_back(0.0);
    while (len_.size() < 2 || len_.back() < total_length) {
      if (psi_.back() > 64.0 * std::numbers::pi) {
        throw std::invalid_argument("stroke length exceeds 32 turns of its ellipse");
      }
      const double next = psi_.back() + step;
      len_.push_back(len_.back() + segment_length(psi_.back(), next));
      psi_.push_back(next);
    }
    origin_ = arc_.point_at(arc_.arc_start);
    total_ = total_length;
    final_ = locate(total_length);
  }

  /// Displacement from the arc start after travelling distance s.
  std::array<double, 2> displacement(double s) const {
    if (s <= 0.0) return {0.0, 0.0};
    if (s == total_) return final_;
    return locate(s);
  }

 private:
  std::array<double, 2> locate(double s) const {
    const double psi = psi_at(s);
    const auto p = arc_.point_at(arc_.arc_start + dir_ * psi);
    return {p[0] - origin_[0], p[1] - origin_[1]};
  }

  double segment_length(double psi0, double psi1) const {
    return std::abs(arc_.arc_length(arc_.arc_start + dir_ * psi0, arc_.arc_start + dir_ * psi1));
  }

  double psi_at(double s) const {
    if (s <= 0.0) return 0.0;
    auto it = std::upper_bound(len_.begin(), len_.end(), s);
    std::size_t k = it == len_.begin() ? 0 : static_cast<std::size_t>(it - len_.begin()) - 1;
    k = std::min(k, len_.size() - 2);
    const double lo = psi_[k];
    const double hi = psi_[k + 1];
    double psi = lo + (hi - lo) * (s - len_[k]) / (len_[k + 1] - len_[k]);
    for (int it_n = 0; it_n < 6; ++it_n) {
      const double f = len_[k] + segment_length(lo, psi) - s;
      const double phi = arc_.arc_start + dir_ * psi;
      const double sn = std::sin(phi), cs = std::cos(phi);
      const double deriv = std::sqrt(arc_.a * arc_.a * sn * sn + arc_.b * arc_.b * cs * cs);
      if (deriv <= 0.0) break;
      const double delta = f / deriv;
      psi -= delta;
      if (std::abs(delta) < 1e-15) break;
    }
    return psi;
  }

  EllipticArc arc_;
  double dir_;
  std::vector<double> psi_;
  std::vector<double> len_;
  std::array<double, 2> origin_{};
  double total_ = 0.0;
  std::array<double, 2> final_{};
};

}  // namespace

InkTrace synthesize_trace(std::span<const SynthStroke> strokes, double sample_hz, double start_x,
                          double start_y) {
  if (!(sample_hz > 0.0)) throw std::invalid_argument("sample_hz must be > 0");
  if (strokes.empty()) throw std::invalid_argument("synthesize_trace needs at least one stroke");

  struct Group {
    std::size_t first = 0, last = 0;  // inclusive stroke indices
    double t_begin = 0.0, t_end = 0.0;
    double ox = 0.0, oy = 0.0;
  };
  std::vector<Group> groups;
  std::vector<ArcWalker> walkers;
  std::vector<double> lengths;
  walkers.reserve(strokes.size());
  for (std::size_t k = 0; k < strokes.size(); ++k) {
    const SynthStroke& s = strokes[k];
    if (!(s.beta.t1 > s.beta.t0) || !(s.beta.p > 0.0) || !(s.beta.q > 0.0) ||
        !(s.beta.amplitude >= 0.0)) {
      throw std::invalid_argument("stroke " + std::to_string(k) + " has an invalid Beta profile");
    }
    if (!(s.arc.a > 0.0) || !(s.arc.b > 0.0)) {
      throw std::invalid_argument("stroke " + std::to_string(k) + " has an invalid ellipse");
    }
    const double total = s.beta.amplitude * beta_area(s.beta);
    lengths.push_back(total);
    walkers.emplace_back(s.arc, s.direction, total);
    if (groups.empty() || s.lift_before) {
      if (!groups.empty() && !(s.beta.t0 > groups.back().t_end)) {
        throw std::invalid_argument("stroke " + std::to_string(k) +
                                    " lifts the pen but overlaps the previous stroke in time");
      }
      groups.push_back({k, k, s.beta.t0, s.beta.t1});
    } else {
      groups.back().last = k;
      groups.back().t_begin = std::min(groups.back().t_begin, s.beta.t0);
      groups.back().t_end = std::max(groups.back().t_end, s.beta.t1);
    }
  }
  double ox = start_x, oy = start_y;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g > 0) {
      ox += strokes[groups[g].first].lift_dx;
      oy += strokes[groups[g].first].lift_dy;
    }
    groups[g].ox = ox;
    groups[g].oy = oy;
    for (std::size_t k = groups[g].first; k <= groups[g].last; ++k) {
      const auto d = walkers[k].displacement(lengths[k]);
      ox += d[0];
      oy += d[1];
    }
  }

  auto group_position = [&](const Group& g, double t) {
    std::array<double, 2> p{g.ox, g.oy};
    for (std::size_t k = g.first; k <= g.last; ++k) {
      const double s = strokes[k].beta.amplitude * beta_integral(strokes[k].beta, t);
      const auto d = walkers[k].displacement(s);
      p[0] += d[0];
      p[1] += d[1];
    }
    return p;
  };

  const double t_begin = groups.front().t_begin;
  const double t_end = groups.back().t_end;
  const auto steps = static_cast<long>(std::ceil((t_end - t_begin) * sample_hz - 1e-9));
  InkTrace out;
  out.meta["source"] = "synthesizer";
  out.points.reserve(static_cast<std::size_t>(steps) + 1);
  std::size_t g = 0;
  std::vector<bool> gap_sampled(groups.size(), false);
  for (long i = 0; i <= steps; ++i) {
    const double t = t_begin + static_cast<double>(i) / sample_hz;
    while (g + 1 < groups.size() && t >= groups[g + 1].t_begin) ++g;
    if (t <= groups[g].t_end || g + 1 == groups.size()) {
      const auto p = group_position(groups[g], t);
      out.points.push_back({p[0], p[1], t, 1});
    } else {
      const auto a = group_position(groups[g], groups[g].t_end);
      const Group& next = groups[g + 1];
      const double w = (t - groups[g].t_end) / (next.t_begin - groups[g].t_end);
      out.points.push_back({a[0] + w * (next.ox - a[0]), a[1] + w * (next.oy - a[1]), t, 0});
      gap_sampled[g + 1] = true;
    }
  }
  for (std::size_t k = 1; k < groups.size(); ++k) {
    if (!gap_sampled[k]) {
      throw std::invalid_argument("pen lift before stroke " + std::to_string(groups[k].first) +
                                  " is shorter than the sampling step");
    }
  }
  return out;
}

}  // namespace betaink
