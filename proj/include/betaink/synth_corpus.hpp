#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "betaink/beta_elliptic.hpp"
#include "betaink/ink.hpp"
#include "betaink/perceptual.hpp"
#include "betaink/random.hpp"

namespace betaink {

/// One BPC of a class template.
///  Simple BPCs are drawn as 2-3 collinear, nearly flat strokes travelling
///  along heading_deg, `size` long in total. The heading must fold into the
///  BPC's region.
///  Half occlusions are three circular 45-degree arcs of radius `size`, in a
///  fixed direction: DownHalfOcclusion a left-to-right cup, UpHalfOcclusion a
///  left-to-right cap, LeftHalfOcclusion "(" and RightHalfOcclusion ")" both
///  drawn bottom to top.
///  Occlusion is eight 45-degree arcs of radius `size` starting along
///  heading_deg, turning counter-clockwise for sense +1 and clockwise for -1.
struct TemplateElement {
  Bpc bpc = Bpc::Valley;
  double heading_deg = 0.0;
  double size = 1.0;
  int sense = 1;
  /// Lift the pen before this element and move by (lift_dx, lift_dy).
  bool lift_before = false;
  double lift_dx = 0.0;
  double lift_dy = 0.0;
};

struct Variability {
  double heading_deg = 6.0;    // uniform +- per stroke
  double size_frac = 0.15;     // uniform +- relative, per element
  double duration_lo = 0.18;   // seconds per stroke
  double duration_hi = 0.28;
  double shape_lo = 1.6;       // p and q range
  double shape_hi = 3.2;
  double lift_gap_lo = 0.12;   // seconds
  double lift_gap_hi = 0.20;
  double lift_frac = 0.1;      // uniform +- relative jitter of lift offsets
};

struct SyntheticClassSpec {
  std::string name;
  std::vector<TemplateElement> elements;
  Variability variability{};

  /// Throws std::invalid_argument naming the spec when a template cannot be
  /// rendered as a connected stroke chain.
  void validate() const;
  /// Expected BPCs per pen-down stroke.
  std::vector<std::vector<Bpc>> bpcs_per_pen_stroke() const;
  /// "Occlusion | LeftHalfOcclusion, Shaft" style summary.
  std::string decomposition() const;
};

std::vector<SyntheticClassSpec> default_digit_specs();
std::vector<SyntheticClassSpec> default_letter_specs();

/// Elliptic strokes of one random rendering of a spec.
std::vector<SynthStroke> render_template(const SyntheticClassSpec& spec, Rng& rng);

struct SynthOptions {
  double sample_hz = 100.0;
};

/// per_class traces per spec, class-major order, labelled with the spec name.
/// Sample i of class c uses a seed derived from (seed, c, i).
std::vector<InkTrace> synth_corpus(std::span<const SyntheticClassSpec> specs, int per_class,
                                   std::uint64_t seed, const SynthOptions& opts = {});

std::vector<std::string> class_names(std::span<const SyntheticClassSpec> specs);

}  // namespace betaink
