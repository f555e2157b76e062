#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace betaink {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Digital filter as zeros, poles and gain.
struct ZpkFilter {
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> poles;
  double gain = 1.0;
};

/// Second-order section in transposed direct form II, a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct SosFilter {
  std::vector<Biquad> sections;
};

/// Chebyshev type I low-pass via the bilinear transform with cutoff prewarping.
/// The passband edge (gain 1/sqrt(1+eps^2)) sits at cutoff_hz.
ZpkFilter chebyshev1_lowpass_zpk(int order, double ripple_db, double cutoff_hz, double sample_hz);
SosFilter zpk_to_sos(const ZpkFilter& zpk);

std::complex<double> frequency_response(const ZpkFilter& zpk, double freq_hz, double sample_hz);
std::complex<double> frequency_response(const SosFilter& sos, double freq_hz, double sample_hz);

/// Causal filtering with the steady-state initial conditions for a constant
/// input equal to x[0].
std::vector<double> sosfilt(const SosFilter& sos, std::span<const double> x);

/// Zero-phase forward-backward filtering with odd-reflection padding.
/// Inputs with fewer than 2 samples are returned unchanged.
std::vector<double> filtfilt(const SosFilter& sos, std::span<const double> x);

}  // namespace betaink
