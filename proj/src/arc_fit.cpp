#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "betaink/beta_elliptic.hpp"

namespace betaink {

namespace {

constexpr double kChordAspect = 1e-6;

ArcFit chord_fit(const BetaPoints& bp) {
  ArcFit out;
  out.method = ArcFitMethod::Chord;
  const double dx = bp.m3.x - bp.m1.x, dy = bp.m3.y - bp.m1.y;
  const double half = 0.5 * std::hypot(dx, dy);
  out.arc.x0 = 0.5 * (bp.m1.x + bp.m3.x);
  out.arc.y0 = 0.5 * (bp.m1.y + bp.m3.y);
  out.arc.a = half > 0.0 ? half : 1e-12;
  out.arc.b = out.arc.a * kChordAspect;
  out.arc.theta = half > 0.0 ? deviation_angle(bp.m1.x, bp.m1.y, bp.m3.x, bp.m3.y) : 0.0;
  // Folding may flip the axis relative to M1 -> M3.
  const bool flipped = std::cos(std::atan2(dy, dx) - out.arc.theta) < 0.0;
  out.arc.arc_start = flipped ? 0.0 : std::numbers::pi;
  out.arc.arc_end = flipped ? std::numbers::pi : 0.0;
  return out;
}

ArcFit circle_fit(const BetaPoints& bp) {
  const double x1 = bp.m1.x, y1 = bp.m1.y;
  const double x2 = bp.m2.x, y2 = bp.m2.y;
  const double x3 = bp.m3.x, y3 = bp.m3.y;
  const double scale = std::max({std::hypot(x2 - x1, y2 - y1), std::hypot(x3 - x2, y3 - y2),
                                 std::hypot(x3 - x1, y3 - y1)});
  const double d = 2.0 * (x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2));
  if (!(scale > 0.0) || std::abs(d) < 1e-9 * scale * scale) return chord_fit(bp);
  const double s1 = x1 * x1 + y1 * y1, s2 = x2 * x2 + y2 * y2, s3 = x3 * x3 + y3 * y3;
  ArcFit out;
  out.method = ArcFitMethod::Circle;
  out.arc.x0 = (s1 * (y2 - y3) + s2 * (y3 - y1) + s3 * (y1 - y2)) / d;
  out.arc.y0 = (s1 * (x3 - x2) + s2 * (x1 - x3) + s3 * (x2 - x1)) / d;
  out.arc.a = out.arc.b = std::hypot(x1 - out.arc.x0, y1 - out.arc.y0);
  out.arc.theta = (x1 != x3 || y1 != y3) ? deviation_angle(x1, y1, x3, y3) : 0.0;
  out.arc.arc_start = out.arc.parametric_angle(x1, y1);
  out.arc.arc_end = out.arc.parametric_angle(x3, y3);
  return out;
}

}  // namespace

ArcFit fit_arc(std::span<const Point2> points, const BetaPoints& bp) {
  const std::size_t n = points.size();
  if (n < 5) return circle_fit(bp);

  double mx = 0.0, my = 0.0;
  for (const Point2& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double spread = 0.0;
  for (const Point2& p : points) spread += (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my);
  const double scale = std::sqrt(spread / static_cast<double>(n));
  if (!(scale > 0.0)) return chord_fit(bp);

  Eigen::MatrixXd d1(n, 3), d2(n, 3);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (points[i].x - mx) / scale;
    const double y = (points[i].y - my) / scale;
    const auto r = static_cast<Eigen::Index>(i);
    d1.row(r) << x * x, x * y, y * y;
    d2.row(r) << x, y, 1.0;
    cov += Eigen::Vector2d(x, y) * Eigen::RowVector2d(x, y);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> cov_eig(cov);
  if (cov_eig.eigenvalues()[0] < 1e-10 * cov_eig.eigenvalues()[1]) return circle_fit(bp);

  const Eigen::Matrix3d s1 = d1.transpose() * d1;
  const Eigen::Matrix3d s2 = d1.transpose() * d2;
  const Eigen::Matrix3d s3 = d2.transpose() * d2;
  Eigen::FullPivLU<Eigen::Matrix3d> s3_lu(s3);
  if (!s3_lu.isInvertible()) return circle_fit(bp);
  const Eigen::Matrix3d t = -s3_lu.solve(s2.transpose());
  const Eigen::Matrix3d m = s1 + s2 * t;
  Eigen::Matrix3d reduced;
  reduced.row(0) = m.row(2) / 2.0;
  reduced.row(1) = -m.row(1);
  reduced.row(2) = m.row(0) / 2.0;

  Eigen::EigenSolver<Eigen::Matrix3d> es(reduced);
  Eigen::Vector3d quad;
  bool found = false;
  double best_cond = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d v = es.eigenvectors().col(k).real();
    const double cond = 4.0 * v[0] * v[2] - v[1] * v[1];
    if (cond > best_cond) {
      best_cond = cond;
      quad = v;
      found = true;
    }
  }
  if (!found) return circle_fit(bp);
  const Eigen::Vector3d lin = t * quad;

  const double A = quad[0], B = quad[1], C = quad[2];
  const double D = lin[0], E = lin[1], F = lin[2];
  const double den = B * B - 4.0 * A * C;
  if (!(den < 0.0)) return circle_fit(bp);
  const double xc = (2.0 * C * D - B * E) / den;
  const double yc = (2.0 * A * E - B * D) / den;
  const double fc = A * xc * xc + B * xc * yc + C * yc * yc + D * xc + E * yc + F;
  Eigen::Matrix2d q;
  q << A, B / 2.0, B / 2.0, C;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qe(q);
  const double r0 = -fc / qe.eigenvalues()[0];
  const double r1 = -fc / qe.eigenvalues()[1];
  if (!(r0 > 0.0) || !(r1 > 0.0)) return circle_fit(bp);
  const double ax0 = std::sqrt(r0), ax1 = std::sqrt(r1);
  const int major = ax0 >= ax1 ? 0 : 1;
  const Eigen::Vector2d dir = qe.eigenvectors().col(major);

  ArcFit out;
  out.method = ArcFitMethod::Ellipse;
  out.arc.a = std::max(ax0, ax1) * scale;
  out.arc.b = std::min(ax0, ax1) * scale;
  if (!std::isfinite(out.arc.a) || out.arc.a > 1e4 * scale) return circle_fit(bp);
  out.arc.x0 = xc * scale + mx;
  out.arc.y0 = yc * scale + my;
  out.arc.theta = fold_half_turn(std::atan2(dir[1], dir[0]));
  out.arc.arc_start = out.arc.parametric_angle(bp.m1.x, bp.m1.y);
  out.arc.arc_end = out.arc.parametric_angle(bp.m3.x, bp.m3.y);
  return out;
}

}  // namespace betaink
