#pragma once

#include "betaink/filter.hpp"
#include "betaink/ink.hpp"

namespace betaink {

struct PreprocessConfig {
  double resample_hz = 100.0;
  int filter_order = 3;
  double filter_ripple_db = 0.5;
  double filter_cutoff_hz = 10.0;
  double dehook_arc_fraction = 0.05;
  double dehook_angle_deg = 90.0;
  double normalize_height = 1.0;

  /// Throws ConfigError when a field is out of range or the cutoff is not
  /// below Nyquist.
  void validate() const;
};

/// Resamples every pen-down run to a uniform step via cubic Hermite
/// interpolation of x(t), y(t). Each run keeps its exact endpoints; the step
/// is span / round(span * resample_hz), i.e. the closest uniform step to
/// 1 / resample_hz that tiles the run. Pen-up stretches collapse to a single
/// pen-up sample. Runs with fewer than 2 points pass through unchanged.
InkTrace interpolate(const InkTrace& trace, const PreprocessConfig& cfg);

InkTrace dehook(const InkTrace& trace, const PreprocessConfig& cfg);

/// Zero-phase Chebyshev I low-pass of x and y, applied per pen-down run.
InkTrace lowpass(const InkTrace& trace, const PreprocessConfig& cfg);

InkTrace normalize(const InkTrace& trace, const PreprocessConfig& cfg);

/// interpolate -> dehook -> lowpass -> normalize.
InkTrace preprocess(const InkTrace& trace, const PreprocessConfig& cfg);

}  // namespace betaink
