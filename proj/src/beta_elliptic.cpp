#include "betaink/beta_elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace betaink {

double beta(double t, const BetaProfile& b) {
  if (!(t > b.t0 && t < b.t1)) return 0.0;
  const double tc = b.tc();
  return std::pow((t - b.t0) / (tc - b.t0), b.p) * std::pow((b.t1 - t) / (b.t1 - tc), b.q);
}

double beta_velocity(double t, const BetaProfile& b) { return b.amplitude * beta(t, b); }

BetaPartials beta_partials(double t, const BetaProfile& b) {
  BetaPartials out;
  if (!(t > b.t0 && t < b.t1)) return out;
  const double tc = b.tc();
  const double r1 = (t - b.t0) / (tc - b.t0);
  const double r2 = (b.t1 - t) / (b.t1 - tc);
  out.value = std::pow(r1, b.p) * std::pow(r2, b.q);
  // With u = (t - t0) / (t1 - t0), r1 = u (p+q) / p and r2 = (1-u) (p+q) / q,
  // so d ln(beta) / dp reduces to ln r1 (and likewise ln r2 for q).
  out.d_p = out.value * std::log(r1);
  out.d_q = out.value * std::log(r2);
  return out;
}

double beta_area(const BetaProfile& b) {
  const double uc = b.p / (b.p + b.q);
  return b.duration() * boost::math::beta(b.p + 1.0, b.q + 1.0) /
         (std::pow(uc, b.p) * std::pow(1.0 - uc, b.q));
}

double beta_integral(const BetaProfile& b, double t) {
  if (t <= b.t0) return 0.0;
  if (t >= b.t1) return beta_area(b);
  const double x = (t - b.t0) / b.duration();
  return beta_area(b) * boost::math::ibeta(b.p + 1.0, b.q + 1.0, x);
}

std::array<double, 2> EllipticArc::point_at(double phi) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double u = a * std::cos(phi), v = b * std::sin(phi);
  return {x0 + u * c - v * s, y0 + u * s + v * c};
}

double EllipticArc::parametric_angle(double x, double y) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double dx = x - x0, dy = y - y0;
  const double u = dx * c + dy * s;
  const double v = -dx * s + dy * c;
  return std::atan2(v / b, u / a);
}

double EllipticArc::arc_length(double phi0, double phi1) const {
  const double sweep = phi1 - phi0;
  if (sweep == 0.0) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / (std::numbers::pi / 8))));
  const double h = sweep / panels;
  auto speed = [this](double phi) {
    const double s = std::sin(phi), c = std::cos(phi);
    return std::sqrt(a * a * s * s + b * b * c * c);
  };
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = phi0 + h * k;
    total += boost::math::quadrature::gauss<double, 15>::integrate(speed, lo, lo + h);
  }
  return total;
}

std::array<double, 10> ElliptiStroke::parameters() const {
  return {beta.p, beta.q, beta.t0, beta.t1, beta.amplitude,
          arc.a,  arc.b,  arc.x0,  arc.y0,  arc.theta};
}

double fold_half_turn(double angle) {
  const double pi = std::numbers::pi;
  double a = std::fmod(angle, pi);
  if (a > pi / 2) a -= pi;
  if (a <= -pi / 2) a += pi;
  return a;
}

double deviation_angle(double x0, double y0, double x1, double y1) {
  if (x0 == x1 && y0 == y1) throw std::invalid_argument("deviation angle of coincident points");
  return fold_half_turn(std::atan2(y1 - y0, x1 - x0));
}

std::vector<VelocitySample> curvilinear_velocity(std::span<const InkPoint> pts) {
  const std::size_t n = pts.size();
  if (n < 3) throw std::invalid_argument("curvilinear velocity needs at least 3 points");
  std::vector<VelocitySample> out(n);
  auto rate = [&](std::size_t i, std::size_t j) {
    const double dt = pts[j].t - pts[i].t;
    return std::hypot(pts[j].x - pts[i].x, pts[j].y - pts[i].y) / dt;
  };
  out[0] = {pts[0].t, rate(0, 1)};
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = {pts[i].t, rate(i - 1, i + 1)};
  out[n - 1] = {pts[n - 1].t, rate(n - 2, n - 1)};
  return out;
}

std::vector<VelocitySample> curvilinear_velocity(const InkTrace& trace) {
  return curvilinear_velocity(std::span<const InkPoint>(trace.points));
}

namespace {

// Profile value and partials at t, or their mean over [t - w, t + w] by
// two-panel Simpson when w > 0.
BetaPartials sample_partials(double t, const BetaProfile& b, double w) {
  if (w <= 0.0) return beta_partials(t, b);
  static constexpr double kOffset[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  static constexpr double kWeight[5] = {1.0 / 12, 4.0 / 12, 2.0 / 12, 4.0 / 12, 1.0 / 12};
  BetaPartials out;
  for (int k = 0; k < 5; ++k) {
    const BetaPartials p = beta_partials(t + kOffset[k] * w, b);
    out.value += kWeight[k] * p.value;
    out.d_p += kWeight[k] * p.d_p;
    out.d_q += kWeight[k] * p.d_q;
  }
  return out;
}

// Levenberg-Marquardt over (p, q, amplitude, t0, t1). The t0 and t1 columns
// use central differences; both ends stay within opts.support_slack of the
// starting support.
BetaProfile refine_support(const std::vector<VelocitySample>& s, const BetaProfile& start,
                           const BetaFitOptions& opts) {
  using Vec5 = Eigen::Matrix<double, 5, 1>;
  using Mat5 = Eigen::Matrix<double, 5, 5>;
  const std::size_t n = s.size();
  const double lo0 = start.t0 - opts.support_slack, hi0 = start.t0 + opts.support_slack;
  const double lo1 = start.t1 - opts.support_slack, hi1 = start.t1 + opts.support_slack;
  Eigen::MatrixXd jac(n, 5);
  Eigen::VectorXd res(n);
  auto profile = [](const Vec5& th) { return BetaProfile{th[3], th[4], th[0], th[1], th[2]}; };
  auto feasible = [&](const Vec5& th) {
    return th[0] > 1e-6 && th[1] > 1e-6 && th[2] > 0.0 && th[3] >= lo0 && th[3] <= hi0 &&
           th[4] >= lo1 && th[4] <= hi1 && th[4] > th[3];
  };
  const double w = opts.difference_half_width;
  auto value = [w](double t, const BetaProfile& b) { return sample_partials(t, b, w).value; };
  auto evaluate = [&](const Vec5& th, bool with_jac) {
    const BetaProfile b = profile(th);
    const double h = 1e-7 * b.duration();
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const BetaPartials bp = sample_partials(s[i].t, b, w);
      res[r] = th[2] * bp.value - s[i].v;
      if (with_jac) {
        BetaProfile a = b, c = b;
        a.t0 -= h;
        c.t0 += h;
        const double d_t0 = th[2] * (value(s[i].t, c) - value(s[i].t, a)) / (2 * h);
        a = b;
        c = b;
        a.t1 -= h;
        c.t1 += h;
        const double d_t1 = th[2] * (value(s[i].t, c) - value(s[i].t, a)) / (2 * h);
        jac.row(r) << th[2] * bp.d_p, th[2] * bp.d_q, bp.value, d_t0, d_t1;
      }
    }
    return 0.5 * res.squaredNorm();
  };

  Vec5 theta;
  theta << start.p, start.q, start.amplitude, start.t0, start.t1;
  double cost = evaluate(theta, true);
  double lambda = 1e-3;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Vec5 grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) break;
    const Mat5 jtj = jac.transpose() * jac;
    bool accepted = false;
    while (!accepted && lambda < 1e12) {
      Mat5 damped = jtj;
      for (int k = 0; k < 5; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Vec5 step = damped.ldlt().solve(-grad);
      const Vec5 cand = theta + step;
      if (step.allFinite() && feasible(cand)) {
        const double c = evaluate(cand, false);
        if (c < cost) {
          theta = cand;
          cost = evaluate(theta, true);
          lambda = std::max(lambda * 0.1, 1e-15);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
  return profile(theta);
}

}  // namespace

BetaProfile fit_beta(std::span<const VelocitySample> vel, double t0, double t1,
                     const BetaFitOptions& opts) {
  if (!(t1 > t0)) throw std::invalid_argument("fit_beta needs t0 < t1");
  const double slack = 1e-9 * (t1 - t0);
  std::vector<VelocitySample> s;
  for (const VelocitySample& v : vel) {
    if (v.t >= t0 - slack && v.t <= t1 + slack) s.push_back(v);
  }
  if (s.size() < 5) throw std::invalid_argument("fit_beta needs at least 5 samples in [t0, t1]");
  double vmax = 0.0;
  for (const auto& v : s) vmax = std::max(vmax, v.v);
  if (!(vmax > 0.0)) throw DegenerateStrokeError("zero curvilinear velocity over the stroke");

  const std::size_t n = s.size();
  Eigen::MatrixXd jac(n, 3);
  Eigen::VectorXd res(n);

  auto evaluate = [&](const Eigen::Vector3d& th, bool with_jac) {
    BetaProfile b{t0, t1, th[0], th[1], th[2]};
    for (std::size_t i = 0; i < n; ++i) {
      const BetaPartials bp = sample_partials(s[i].t, b, opts.difference_half_width);
      res[static_cast<Eigen::Index>(i)] = th[2] * bp.value - s[i].v;
      if (with_jac) {
        jac.row(static_cast<Eigen::Index>(i)) << th[2] * bp.d_p, th[2] * bp.d_q, bp.value;
      }
    }
    return 0.5 * res.squaredNorm();
  };

  Eigen::Vector3d theta(2.0, 2.0, vmax);
  double cost = evaluate(theta, true);
  Eigen::Vector3d best = theta;
  double best_cost = cost;
  double lambda = 1e-3;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Eigen::Vector3d grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) break;
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    bool accepted = false;
    while (!accepted && lambda < 1e12) {
      Eigen::Matrix3d damped = jtj;
      for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::Vector3d step = damped.ldlt().solve(-grad);
      const Eigen::Vector3d cand = theta + step;
      if (cand[0] > 1e-6 && cand[1] > 1e-6 && cand[2] > 0.0 && step.allFinite()) {
        const double c = evaluate(cand, false);
        if (c < cost) {
          theta = cand;
          cost = evaluate(theta, true);
          lambda = std::max(lambda * 0.1, 1e-15);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = theta;
    }
    if (!accepted) break;
  }
  BetaProfile fit{t0, t1, best[0], best[1], best[2]};
  if (opts.support_slack > 0.0) fit = refine_support(s, fit, opts);
  return fit;
}

double amplitude_for_sweep(const BetaProfile& beta, const EllipticArc& arc, double sweep) {
  return std::abs(arc.arc_length(arc.arc_start, arc.arc_start + sweep)) / beta_area(beta);
}

}  // namespace betaink
