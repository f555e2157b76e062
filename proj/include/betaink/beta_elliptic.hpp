#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "betaink/ink.hpp"

namespace betaink {

class DegenerateStrokeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Beta velocity impulse on the support (t0, t1). The normalized profile
/// peaks at 1 at tc; amplitude is the peak curvilinear speed (units/s).
struct BetaProfile {
  double t0 = 0.0;
  double t1 = 1.0;
  double p = 2.0;
  double q = 2.0;
  double amplitude = 1.0;

  double tc() const { return (p * t1 + q * t0) / (p + q); }
  double duration() const { return t1 - t0; }
};

/// ((t-t0)/(tc-t0))^p * ((t1-t)/(t1-tc))^q on (t0, t1), 0 elsewhere.
double beta(double t, const BetaProfile& profile);

/// amplitude * beta(t).
double beta_velocity(double t, const BetaProfile& profile);

/// d beta / d p and d beta / d q at fixed t0, t1 (tc moves with p and q).
struct BetaPartials {
  double value = 0.0;
  double d_p = 0.0;
  double d_q = 0.0;
};
BetaPartials beta_partials(double t, const BetaProfile& profile);

/// Integral of the normalized beta over [t0, t].
double beta_integral(const BetaProfile& profile, double t);
/// Integral of the normalized beta over the full support.
double beta_area(const BetaProfile& profile);

/// Ellipse centre, semi-axes a >= b > 0, major-axis angle theta folded into
/// (-pi/2, pi/2], and the parametric angles delimiting the traced arc.
struct EllipticArc {
  double x0 = 0.0;
  double y0 = 0.0;
  double a = 1.0;
  double b = 1.0;
  double theta = 0.0;
  double arc_start = 0.0;
  double arc_end = 0.0;

  std::array<double, 2> point_at(double phi) const;
  /// Parametric angle of the point on the ellipse closest in angle to (x, y).
  double parametric_angle(double x, double y) const;
  /// Arc length between parametric angles phi0 and phi1 (signed sweep).
  double arc_length(double phi0, double phi1) const;
};

struct BetaPoint {
  std::size_t index = 0;
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// M1, M3 delimit the stroke, M2 is the speed maximum and H the orthogonal
/// projection of M2 on the M1-M3 chord.
struct BetaPoints {
  BetaPoint m1, m2, m3, h;
};

enum class ArcFitMethod { Ellipse, Circle, Chord };

struct ElliptiStroke {
  BetaProfile beta;
  EllipticArc arc;
  BetaPoints points;
  double chord_angle = 0.0;
  ArcFitMethod arc_method = ArcFitMethod::Ellipse;
  /// Too few samples or no motion to fit a Beta profile.
  bool degenerate = false;
  std::size_t pen_stroke = 0;

  /// p, q, t0, t1, amplitude, a, b, x0, y0, theta.
  std::array<double, 10> parameters() const;
};

/// Folds an angle into (-pi/2, pi/2].
double fold_half_turn(double angle);

/// atan((y1-y0)/(x1-x0)) with the quadrant-aware arctangent, folded into
/// (-pi/2, pi/2]. Throws std::invalid_argument for coincident points.
double deviation_angle(double x0, double y0, double x1, double y1);

struct VelocitySample {
  double t = 0.0;
  double v = 0.0;
};

/// Central differences, one-sided at the ends. Needs at least 3 points.
std::vector<VelocitySample> curvilinear_velocity(std::span<const InkPoint> points);
std::vector<VelocitySample> curvilinear_velocity(const InkTrace& trace);

struct BetaFitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  /// When > 0, a second pass also fits t0 and t1, each kept within this
  /// distance of the given ends. Segment boundaries sit on the sample grid
  /// while true supports usually do not.
  double support_slack = 0.0;
  /// When > 0, each sample is modelled as the mean of the profile over
  /// [t - w, t + w], which is what central differences of positions measure.
  double difference_half_width = 0.0;
};

/// Damped Gauss-Newton fit of amplitude * beta(t; p, q) to the samples in
/// [t0, t1], starting from p = q = 2 and amplitude = max(v). Needs at least 5
/// samples in the interval; all-zero speed throws DegenerateStrokeError.
/// With support_slack > 0 the support ends are refined as well.
BetaProfile fit_beta(std::span<const VelocitySample> vel, double t0, double t1,
                     const BetaFitOptions& opts = {});

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct ArcFit {
  EllipticArc arc;
  ArcFitMethod method = ArcFitMethod::Ellipse;
  bool degenerate() const { return method == ArcFitMethod::Chord; }
};

/// Direct least-squares ellipse fit under the 4ac - b^2 = 1 constraint on
/// centred, scaled points. Falls back to the circle through M1, M2, M3 when
/// the conic is not a usable ellipse, and to a chord-only result (a = half
/// chord, b tiny, theta = chord angle) when those are collinear.
ArcFit fit_arc(std::span<const Point2> points, const BetaPoints& bp);

struct SegmentOptions {
  std::size_t min_points = 5;
  /// Support refinement slack in sample spacings (0 keeps the cut times).
  /// Cuts can land a sample early where the central difference straddles a
  /// sharp joint, hence two.
  double support_slack_samples = 2.0;
  /// Fit speeds as central-difference means over one sample spacing each side.
  bool difference_model = true;
  /// Moving-average window in samples; 0 derives round(rate / 20) from the
  /// sample spacing.
  std::size_t smoothing_window = 0;
  /// Minimum prominence of a speed valley, as a fraction of the run's peak.
  double prominence = 0.05;
  BetaFitOptions beta_fit{};
};

struct SegmentResult {
  std::vector<ElliptiStroke> strokes;
  std::vector<std::string> warnings;
};

/// Splits every pen-down run at the prominent minima of its smoothed
/// curvilinear speed and fits one Beta profile and elliptic arc per piece.
SegmentResult segment(const InkTrace& trace, const SegmentOptions& opts = {});

/// Indices of the valley boundaries used by segment for one pen-down run,
/// including both ends.
std::vector<std::size_t> velocity_boundaries(std::span<const InkPoint> run,
                                             const SegmentOptions& opts = {});

struct SynthStroke {
  BetaProfile beta;
  EllipticArc arc;
  /// +1 walks the ellipse with increasing parametric angle, -1 decreasing.
  int direction = 1;
  /// Lift the pen before this stroke and start it at the previous end point
  /// plus this offset. Needs a time gap before beta.t0.
  bool lift_before = false;
  double lift_dx = 0.0;
  double lift_dy = 0.0;
};

/// Renders a trajectory whose curvilinear speed is the sum of the strokes'
/// Beta impulses, each stroke advancing along its own ellipse from arc_start;
/// arcs chain end to start. Uniform sampling at sample_hz.
InkTrace synthesize_trace(std::span<const SynthStroke> strokes, double sample_hz,
                          double start_x = 0.0, double start_y = 0.0);

/// Amplitude that makes a stroke travel exactly `sweep` radians of its arc
/// (signed by direction) over the Beta support.
double amplitude_for_sweep(const BetaProfile& beta, const EllipticArc& arc, double sweep);

}  // namespace betaink
