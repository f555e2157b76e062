#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "betaink/ink.hpp"
#include "betaink/random.hpp"

namespace betaink {

enum class NoiseKind { GaussianJitter, Tremble };
enum class NoiseTarget { Train, Test, Both };

std::string noise_kind_name(NoiseKind k);
NoiseKind noise_kind_from_name(const std::string& name);
std::string noise_target_name(NoiseTarget t);
NoiseTarget noise_target_from_name(const std::string& name);

/// sigma is a fraction of the trace's bounding-box height. Gaussian jitter
/// adds i.i.d. offsets of that standard deviation to every point; tremble adds
/// a sinusoid of that amplitude at tremble_hz with an independent random
/// phase per axis.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::GaussianJitter;
  double sigma = 0.0;
  double tremble_hz = 40.0;
  NoiseTarget apply_to = NoiseTarget::Both;

  void validate() const;
  bool applies_to_train() const { return apply_to != NoiseTarget::Test; }
  bool applies_to_test() const { return apply_to != NoiseTarget::Train; }
};

InkTrace add_noise(const InkTrace& trace, const NoiseSpec& spec, Rng& rng);

/// Per-trace seeds derived from (seed, index).
std::vector<InkTrace> add_noise(std::span<const InkTrace> corpus, const NoiseSpec& spec,
                                std::uint64_t seed);

}  // namespace betaink
