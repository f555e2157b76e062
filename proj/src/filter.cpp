#include "betaink/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace betaink {

using cplx = std::complex<double>;

ZpkFilter chebyshev1_lowpass_zpk(int order, double ripple_db, double cutoff_hz, double sample_hz) {
  if (order < 1) throw ConfigError("filter order must be >= 1");
  if (!(ripple_db > 0.0)) throw ConfigError("filter ripple must be > 0 dB");
  if (!(sample_hz > 0.0)) throw ConfigError("sample rate must be > 0");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_hz / 2.0) {
    throw ConfigError("cutoff must lie in (0, Nyquist): cutoff " + std::to_string(cutoff_hz) +
                      " Hz at " + std::to_string(sample_hz) + " Hz sampling");
  }
  const double pi = std::numbers::pi;
  const double eps = std::sqrt(std::pow(10.0, ripple_db / 10.0) - 1.0);
  const double mu = std::asinh(1.0 / eps) / order;
  const double fs2 = 2.0 * sample_hz;
  const double warped = fs2 * std::tan(pi * cutoff_hz / sample_hz);

  ZpkFilter out;
  cplx denom_at_one = 1.0;
  for (int k = 0; k < order; ++k) {
    const double theta = pi * (2.0 * k + 1.0) / (2.0 * order);
    cplx analog(-std::sinh(mu) * std::sin(theta), std::cosh(mu) * std::cos(theta));
    analog *= warped;
    cplx z = (fs2 + analog) / (fs2 - analog);
    out.poles.push_back(z);
    out.zeros.emplace_back(-1.0, 0.0);
    denom_at_one *= (1.0 - z);
  }
  // Odd orders peak at DC; even orders start at the ripple floor.
  const double dc = (order % 2 == 1) ? 1.0 : 1.0 / std::sqrt(1.0 + eps * eps);
  out.gain = dc * denom_at_one.real() / std::pow(2.0, order);
  return out;
}

SosFilter zpk_to_sos(const ZpkFilter& zpk) {
  SosFilter sos;
  std::vector<cplx> upper;
  std::vector<double> real;
  for (const cplx& p : zpk.poles) {
    if (std::abs(p.imag()) < 1e-12) {
      real.push_back(p.real());
    } else if (p.imag() > 0.0) {
      upper.push_back(p);
    }
  }
  for (const cplx& p : upper) {
    sos.sections.push_back({1.0, 2.0, 1.0, -2.0 * p.real(), std::norm(p)});
  }
  for (double p : real) sos.sections.push_back({1.0, 1.0, 0.0, -p, 0.0});
  if (sos.sections.empty()) sos.sections.push_back({});
  Biquad& first = sos.sections.front();
  first.b0 *= zpk.gain;
  first.b1 *= zpk.gain;
  first.b2 *= zpk.gain;
  return sos;
}

std::complex<double> frequency_response(const ZpkFilter& zpk, double freq_hz, double sample_hz) {
  const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / sample_hz);
  cplx h = zpk.gain;
  for (const cplx& q : zpk.zeros) h *= (z - q);
  for (const cplx& p : zpk.poles) h /= (z - p);
  return h;
}

std::complex<double> frequency_response(const SosFilter& sos, double freq_hz, double sample_hz) {
  const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_hz);
  cplx h = 1.0;
  for (const Biquad& s : sos.sections) {
    h *= (s.b0 + zinv * (s.b1 + zinv * s.b2)) / (1.0 + zinv * (s.a1 + zinv * s.a2));
  }
  return h;
}

std::vector<double> sosfilt(const SosFilter& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  if (y.empty()) return y;
  double level = x[0];
  for (const Biquad& s : sos.sections) {
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    double z2 = (s.b2 - s.a2 * dc) * level;
    double z1 = (s.b1 - s.a1 * dc) * level + z2;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    level *= dc;
  }
  return y;
}

std::vector<double> filtfilt(const SosFilter& sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return std::vector<double>(x.begin(), x.end());
  const std::size_t pad = std::min<std::size_t>(3 * (2 * sos.sections.size() + 1), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  std::vector<double> fwd = sosfilt(sos, ext);
  std::reverse(fwd.begin(), fwd.end());
  std::vector<double> bwd = sosfilt(sos, fwd);
  std::reverse(bwd.begin(), bwd.end());
  return std::vector<double>(bwd.begin() + static_cast<std::ptrdiff_t>(pad),
                             bwd.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

}  // namespace betaink
