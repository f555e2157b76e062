#include "betaink/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "betaink/augment.hpp"

namespace betaink {

std::string noise_kind_name(NoiseKind k) {
  return k == NoiseKind::Tremble ? "tremble" : "gaussian_jitter";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "gaussian_jitter") return NoiseKind::GaussianJitter;
  if (name == "tremble") return NoiseKind::Tremble;
  throw std::invalid_argument("unknown noise kind '" + name + "' (gaussian_jitter|tremble)");
}

std::string noise_target_name(NoiseTarget t) {
  switch (t) {
    case NoiseTarget::Train: return "train";
    case NoiseTarget::Test: return "test";
    case NoiseTarget::Both: return "both";
  }
  return "?";
}

NoiseTarget noise_target_from_name(const std::string& name) {
  if (name == "train") return NoiseTarget::Train;
  if (name == "test") return NoiseTarget::Test;
  if (name == "both") return NoiseTarget::Both;
  throw std::invalid_argument("unknown noise target '" + name + "' (train|test|both)");
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (kind == NoiseKind::Tremble && !(tremble_hz > 0.0)) {
    throw std::invalid_argument("tremble_hz must be > 0");
  }
}

InkTrace add_noise(const InkTrace& trace, const NoiseSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.sigma == 0.0 || trace.points.empty()) return trace;
  const BBox b = bounding_box(trace);
  const double ref = b.height() > 0.0 ? b.height() : (b.width() > 0.0 ? b.width() : 1.0);
  const double amp = spec.sigma * ref;
  InkTrace out = trace;
  if (spec.kind == NoiseKind::GaussianJitter) {
    for (InkPoint& p : out.points) {
      p.x += amp * rng.normal();
      p.y += amp * rng.normal();
    }
    return out;
  }
  const double w = 2.0 * std::numbers::pi * spec.tremble_hz;
  const double phx = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double phy = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (InkPoint& p : out.points) {
    p.x += amp * std::sin(w * p.t + phx);
    p.y += amp * std::sin(w * p.t + phy);
  }
  return out;
}

std::vector<InkTrace> add_noise(std::span<const InkTrace> corpus, const NoiseSpec& spec,
                                std::uint64_t seed) {
  std::vector<InkTrace> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Rng rng(derive_seed({seed, 0x4e4f495345ULL, i}));
    out.push_back(add_noise(corpus[i], spec, rng));
  }
  return out;
}

}  // namespace betaink
