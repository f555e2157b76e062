#include "betaink/synth_corpus.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace betaink {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct ArcPlan {
  double heading_deg;
  double chord_or_radius;
  bool flat;
  int turn;  // +1 counter-clockwise, -1 clockwise
};

std::vector<double> half_occlusion_headings(Bpc b) {
  switch (b) {
    case Bpc::DownHalfOcclusion: return {-45.0, 0.0, 45.0};
    case Bpc::UpHalfOcclusion: return {45.0, 0.0, -45.0};
    case Bpc::LeftHalfOcclusion: return {135.0, 90.0, 45.0};
    case Bpc::RightHalfOcclusion: return {45.0, 90.0, 135.0};
    default: return {};
  }
}

int half_occlusion_turn(Bpc b) {
  return b == Bpc::DownHalfOcclusion || b == Bpc::RightHalfOcclusion ? 1 : -1;
}

Epc epc_of_simple(Bpc b) {
  switch (b) {
    case Bpc::LeftObliqueShaft: return Epc::LeftObliqueShaft;
    case Bpc::Shaft: return Epc::Shaft;
    case Bpc::RightObliqueShaft: return Epc::RightObliqueShaft;
    default: return Epc::Valley;
  }
}

// Elliptic arc whose chord from start to end points along `heading`, walked
// counter-clockwise over the bottom of the ellipse (turn +1) or clockwise
// over its top (turn -1), covering parametric angles 2 * half_sweep.
std::pair<EllipticArc, int> oriented_arc(double heading, double a, double b, double half_sweep,
                                         int turn) {
  EllipticArc arc;
  arc.a = a;
  arc.b = b;
  arc.theta = fold_half_turn(heading);
  const long k = std::lround((heading - arc.theta) / std::numbers::pi);
  const double flip = (k % 2 != 0) ? std::numbers::pi : 0.0;
  const double half_pi = std::numbers::pi / 2;
  if (turn > 0) {
    arc.arc_start = -half_pi - half_sweep + flip;
    arc.arc_end = arc.arc_start + 2.0 * half_sweep;
  } else {
    arc.arc_start = half_pi + half_sweep + flip;
    arc.arc_end = arc.arc_start - 2.0 * half_sweep;
  }
  return {arc, turn > 0 ? 1 : -1};
}

}  // namespace

void SyntheticClassSpec::validate() const {
  auto fail = [&](std::size_t i, const std::string& why) {
    throw std::invalid_argument("class template '" + name + "' element " + std::to_string(i) +
                                ": " + why);
  };
  if (name.empty()) throw std::invalid_argument("class template without a name");
  if (elements.empty()) throw std::invalid_argument("class template '" + name + "' is empty");
  const auto& v = variability;
  if (!(v.duration_lo > 0.0 && v.duration_lo <= v.duration_hi) ||
      !(v.shape_lo > 0.0 && v.shape_lo <= v.shape_hi) ||
      !(v.lift_gap_lo > 0.0 && v.lift_gap_lo <= v.lift_gap_hi) || !(v.heading_deg >= 0.0) ||
      !(v.size_frac >= 0.0 && v.size_frac < 1.0) || !(v.lift_frac >= 0.0)) {
    throw std::invalid_argument("class template '" + name + "' has invalid variability ranges");
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const TemplateElement& e = elements[i];
    if (!(e.size > 0.0)) fail(i, "size must be > 0");
    if (i == 0 && e.lift_before) fail(i, "the first element cannot follow a pen lift");
    if (bpc_class(e.bpc) == BpcClass::Simple) {
      const double folded = fold_half_turn(e.heading_deg * kDeg);
      const EpcMembership m = epc_membership(folded);
      if (m[epc_of_simple(e.bpc)] != 1.0) {
        fail(i, "heading " + std::to_string(e.heading_deg) + " does not draw a " +
                    std::string(bpc_name(e.bpc)));
      }
    } else if (e.bpc == Bpc::Occlusion && e.sense != 1 && e.sense != -1) {
      fail(i, "occlusion sense must be +1 or -1");
    }
  }
}

std::vector<std::vector<Bpc>> SyntheticClassSpec::bpcs_per_pen_stroke() const {
  std::vector<std::vector<Bpc>> out;
  for (const TemplateElement& e : elements) {
    if (out.empty() || e.lift_before) out.emplace_back();
    out.back().push_back(e.bpc);
  }
  return out;
}

std::string SyntheticClassSpec::decomposition() const {
  std::string s;
  const auto groups = bpcs_per_pen_stroke();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g > 0) s += " | ";
    for (std::size_t k = 0; k < groups[g].size(); ++k) {
      if (k > 0) s += ", ";
      s += bpc_name(groups[g][k]);
    }
  }
  return s;
}

std::vector<SynthStroke> render_template(const SyntheticClassSpec& spec, Rng& rng) {
  spec.validate();
  const Variability& v = spec.variability;
  std::vector<SynthStroke> out;
  double t = 0.0;
  for (const TemplateElement& e : spec.elements) {
    std::vector<ArcPlan> plan;
    const double size = e.size * rng.uniform(1.0 - v.size_frac, 1.0 + v.size_frac);
    if (bpc_class(e.bpc) == BpcClass::Simple) {
      const int n = 2 + static_cast<int>(rng.below(2));
      for (int k = 0; k < n; ++k) {
        plan.push_back({e.heading_deg, size / n, true, rng.uniform() < 0.5 ? 1 : -1});
      }
    } else if (e.bpc == Bpc::Occlusion) {
      for (int k = 0; k < 8; ++k) plan.push_back({e.heading_deg + 45.0 * e.sense * k, size, false, e.sense});
    } else {
      for (double h : half_occlusion_headings(e.bpc)) {
        plan.push_back({h, size, false, half_occlusion_turn(e.bpc)});
      }
    }
    bool lift = e.lift_before;
    for (const ArcPlan& ap : plan) {
      const double heading = (ap.heading_deg + rng.uniform(-v.heading_deg, v.heading_deg)) * kDeg;
      SynthStroke s;
      if (lift) {
        t += rng.uniform(v.lift_gap_lo, v.lift_gap_hi);
        s.lift_before = true;
        s.lift_dx = e.lift_dx * rng.uniform(1.0 - v.lift_frac, 1.0 + v.lift_frac);
        s.lift_dy = e.lift_dy * rng.uniform(1.0 - v.lift_frac, 1.0 + v.lift_frac);
        lift = false;
      }
      s.beta.t0 = t;
      s.beta.t1 = t + rng.uniform(v.duration_lo, v.duration_hi);
      s.beta.p = rng.uniform(v.shape_lo, v.shape_hi);
      s.beta.q = rng.uniform(v.shape_lo, v.shape_hi);
      double half_sweep = 0.0;
      if (ap.flat) {
        half_sweep = std::numbers::pi / 2;
        const double a = 0.5 * ap.chord_or_radius;
        std::tie(s.arc, s.direction) = oriented_arc(heading, a, 0.03 * a, half_sweep, ap.turn);
      } else {
        half_sweep = std::numbers::pi / 8;
        const double r = ap.chord_or_radius;
        std::tie(s.arc, s.direction) = oriented_arc(heading, r, r, half_sweep, ap.turn);
      }
      s.beta.amplitude = 1.0;
      s.beta.amplitude = amplitude_for_sweep(s.beta, s.arc, s.direction * 2.0 * half_sweep);
      t = s.beta.t1;
      out.push_back(s);
    }
  }
  return out;
}

std::vector<SyntheticClassSpec> default_digit_specs() {
  using B = Bpc;
  auto simple = [](Bpc b, double heading, double size) {
    return TemplateElement{b, heading, size, 1, false, 0.0, 0.0};
  };
  auto arc = [](Bpc b, double size) { return TemplateElement{b, 0.0, size, 1, false, 0.0, 0.0}; };
  auto occ = [](double heading, double radius, int sense) {
    return TemplateElement{B::Occlusion, heading, radius, sense, false, 0.0, 0.0};
  };
  auto lifted = [](TemplateElement e, double dx, double dy) {
    e.lift_before = true;
    e.lift_dx = dx;
    e.lift_dy = dy;
    return e;
  };
  return {
      {"0", {occ(180.0, 0.5, 1)}, {}},
      {"1", {simple(B::RightObliqueShaft, 45.0, 0.35), simple(B::Shaft, 270.0, 1.0)}, {}},
      {"2",
       {arc(B::UpHalfOcclusion, 0.3), simple(B::RightObliqueShaft, 225.0, 0.8),
        simple(B::Valley, 0.0, 0.6)},
       {}},
      {"3", {arc(B::RightHalfOcclusion, 0.25), arc(B::RightHalfOcclusion, 0.25)}, {}},
      {"4",
       {simple(B::Shaft, 270.0, 0.6), simple(B::Valley, 0.0, 0.7),
        lifted(simple(B::Shaft, 270.0, 1.0), -0.25, 0.8)},
       {}},
      {"5",
       {simple(B::Valley, 180.0, 0.5), simple(B::Shaft, 270.0, 0.4),
        arc(B::RightHalfOcclusion, 0.25)},
       {}},
      {"6", {arc(B::LeftHalfOcclusion, 0.5), occ(0.0, 0.25, 1)}, {}},
      {"7", {simple(B::Valley, 0.0, 0.6), simple(B::RightObliqueShaft, 225.0, 1.0)}, {}},
      {"8", {occ(180.0, 0.25, 1), lifted(occ(180.0, 0.3, 1), 0.0, -0.55)}, {}},
      {"9", {occ(180.0, 0.25, 1), simple(B::Shaft, 270.0, 0.9)}, {}},
  };
}

std::vector<SyntheticClassSpec> default_letter_specs() {
  using B = Bpc;
  auto simple = [](Bpc b, double heading, double size) {
    return TemplateElement{b, heading, size, 1, false, 0.0, 0.0};
  };
  auto arc = [](Bpc b, double size) { return TemplateElement{b, 0.0, size, 1, false, 0.0, 0.0}; };
  return {
      {"a", {arc(B::LeftHalfOcclusion, 0.25), simple(B::Shaft, 270.0, 0.5)}, {}},
      {"b", {simple(B::Shaft, 270.0, 1.0), arc(B::RightHalfOcclusion, 0.25)}, {}},
      {"c", {arc(B::LeftHalfOcclusion, 0.3)}, {}},
      {"l", {simple(B::Shaft, 270.0, 1.0)}, {}},
      {"u", {arc(B::DownHalfOcclusion, 0.25), simple(B::Shaft, 270.0, 0.4)}, {}},
      {"v", {simple(B::LeftObliqueShaft, 315.0, 0.6), simple(B::RightObliqueShaft, 45.0, 0.6)}, {}},
      {"w",
       {simple(B::LeftObliqueShaft, 315.0, 0.5), simple(B::RightObliqueShaft, 45.0, 0.5),
        simple(B::LeftObliqueShaft, 315.0, 0.5), simple(B::RightObliqueShaft, 45.0, 0.5)},
       {}},
      {"z",
       {simple(B::Valley, 0.0, 0.5), simple(B::RightObliqueShaft, 225.0, 0.7),
        simple(B::Valley, 0.0, 0.5)},
       {}},
  };
}

std::vector<InkTrace> synth_corpus(std::span<const SyntheticClassSpec> specs, int per_class,
                                   std::uint64_t seed, const SynthOptions& opts) {
  if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
  if (specs.empty()) throw std::invalid_argument("synth_corpus needs at least one class spec");
  for (const auto& s : specs) s.validate();
  std::vector<InkTrace> out;
  out.reserve(specs.size() * static_cast<std::size_t>(per_class));
  for (std::size_t c = 0; c < specs.size(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      Rng rng(derive_seed({seed, c, static_cast<std::uint64_t>(i)}));
      const std::vector<SynthStroke> strokes = render_template(specs[c], rng);
      InkTrace t = synthesize_trace(strokes, opts.sample_hz);
      t.label = specs[c].name;
      t.meta["writer"] = "synthetic";
      t.meta["template"] = specs[c].decomposition();
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<std::string> class_names(std::span<const SyntheticClassSpec> specs) {
  std::vector<std::string> out;
  for (const auto& s : specs) out.push_back(s.name);
  return out;
}

}  // namespace betaink
