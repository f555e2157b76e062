#include "betaink/perceptual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betaink {

std::string_view epc_name(Epc e) {
  switch (e) {
    case Epc::Valley: return "Valley";
    case Epc::LeftObliqueShaft: return "LeftObliqueShaft";
    case Epc::Shaft: return "Shaft";
    case Epc::RightObliqueShaft: return "RightObliqueShaft";
  }
  return "?";
}

std::string_view epc_abbreviation(Epc e) { return bpc_abbreviation(simple_bpc(e)); }

std::string_view bpc_name(Bpc b) {
  switch (b) {
    case Bpc::Valley: return "Valley";
    case Bpc::LeftObliqueShaft: return "LeftObliqueShaft";
    case Bpc::Shaft: return "Shaft";
    case Bpc::RightObliqueShaft: return "RightObliqueShaft";
    case Bpc::RightHalfOcclusion: return "RightHalfOcclusion";
    case Bpc::LeftHalfOcclusion: return "LeftHalfOcclusion";
    case Bpc::UpHalfOcclusion: return "UpHalfOcclusion";
    case Bpc::DownHalfOcclusion: return "DownHalfOcclusion";
    case Bpc::Occlusion: return "Occlusion";
  }
  return "?";
}

std::string_view bpc_abbreviation(Bpc b) {
  switch (b) {
    case Bpc::Valley: return "V";
    case Bpc::LeftObliqueShaft: return "L-O-S";
    case Bpc::Shaft: return "S";
    case Bpc::RightObliqueShaft: return "R-O-S";
    case Bpc::RightHalfOcclusion: return "R-H-O";
    case Bpc::LeftHalfOcclusion: return "L-H-O";
    case Bpc::UpHalfOcclusion: return "U-H-O";
    case Bpc::DownHalfOcclusion: return "D-H-O";
    case Bpc::Occlusion: return "Occ";
  }
  return "?";
}

Bpc bpc_from_name(std::string_view name) {
  for (Bpc b : kAllBpcs) {
    if (bpc_name(b) == name || bpc_abbreviation(b) == name) return b;
  }
  throw std::invalid_argument("unknown BPC '" + std::string(name) + "'");
}

BpcClass bpc_class(Bpc b) {
  switch (b) {
    case Bpc::Valley:
    case Bpc::LeftObliqueShaft:
    case Bpc::Shaft:
    case Bpc::RightObliqueShaft:
      return BpcClass::Simple;
    default:
      return BpcClass::Complex;
  }
}

Bpc simple_bpc(Epc e) {
  switch (e) {
    case Epc::Valley: return Bpc::Valley;
    case Epc::LeftObliqueShaft: return Bpc::LeftObliqueShaft;
    case Epc::Shaft: return Bpc::Shaft;
    case Epc::RightObliqueShaft: return Bpc::RightObliqueShaft;
  }
  return Bpc::Valley;
}

int rotation_index(Epc e) {
  switch (e) {
    case Epc::Valley: return 0;
    case Epc::RightObliqueShaft: return 1;
    case Epc::Shaft: return 2;
    case Epc::LeftObliqueShaft: return 3;
  }
  return 0;
}

Epc EpcMembership::dominant() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < mu.size(); ++k) {
    if (mu[k] > mu[best]) best = k;
  }
  return static_cast<Epc>(best);
}

void FuzzyRegions::validate() const {
  const double pi = std::numbers::pi;
  if (!(half_width > 0.0 && half_width < pi / 4)) {
    throw std::invalid_argument("region half width must lie in (0, pi/4)");
  }
  const double narrowest = std::min(2.0 * half_width, pi / 2 - 2.0 * half_width);
  if (!(overlap > 0.0 && overlap <= narrowest)) {
    throw std::invalid_argument("overlap band must lie in (0, narrowest region width]");
  }
}

EpcMembership epc_membership(double angle, const FuzzyRegions& regions) {
  const double pi = std::numbers::pi;
  if (!(angle > -pi / 2 && angle <= pi / 2)) {
    throw std::domain_error("chord angle " + std::to_string(angle) + " outside (-pi/2, pi/2]");
  }
  regions.validate();
  const double hw = regions.half_width;
  struct Boundary {
    double at;
    Epc lower, upper;
  };
  const std::array<Boundary, 4> bounds{{
      {-(pi / 2 - hw), Epc::Shaft, Epc::LeftObliqueShaft},
      {-hw, Epc::LeftObliqueShaft, Epc::Valley},
      {hw, Epc::Valley, Epc::RightObliqueShaft},
      {pi / 2 - hw, Epc::RightObliqueShaft, Epc::Shaft},
  }};
  EpcMembership m;
  for (const Boundary& b : bounds) {
    const double off = angle - b.at;
    if (std::abs(off) < regions.overlap / 2) {
      const double lower = 0.5 - off / regions.overlap;
      m.mu[static_cast<std::size_t>(b.lower)] = lower;
      m.mu[static_cast<std::size_t>(b.upper)] = 1.0 - lower;
      return m;
    }
  }
  Epc owner = Epc::Shaft;
  if (angle > bounds[0].at && angle < bounds[1].at) owner = Epc::LeftObliqueShaft;
  if (angle >= bounds[1].at && angle <= bounds[2].at) owner = Epc::Valley;
  if (angle > bounds[2].at && angle < bounds[3].at) owner = Epc::RightObliqueShaft;
  m.mu[static_cast<std::size_t>(owner)] = 1.0;
  return m;
}

std::vector<Epc> PerceptualSequence::dominant_epcs() const {
  std::vector<Epc> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.membership.dominant());
  return out;
}

PerceptualSequence encode_sequence(std::span<const ElliptiStroke> strokes,
                                   const FuzzyRegions& regions, bool with_beta) {
  if (strokes.empty()) throw std::invalid_argument("encode_sequence needs at least one stroke");
  PerceptualSequence seq;
  seq.items.reserve(strokes.size());
  for (const ElliptiStroke& st : strokes) {
    PerceptualItem item;
    item.chord_angle = st.chord_angle;
    item.degenerate = st.degenerate;
    item.pen_stroke = st.pen_stroke;
    item.membership =
        st.degenerate ? EpcMembership::uniform() : epc_membership(st.chord_angle, regions);
    if (with_beta) item.beta_features = st.parameters();
    seq.items.push_back(item);
  }
  return seq;
}

namespace {

// +1 for a counter-clockwise step to the adjacent region, -1 clockwise,
// 0 for no change, 2 for a jump across two regions.
int rotation_step(Epc from, Epc to) {
  const int d = ((rotation_index(to) - rotation_index(from)) % 4 + 4) % 4;
  if (d == 1) return 1;
  if (d == 3) return -1;
  return d == 0 ? 0 : 2;
}

// Last index of the monotone rotation chain starting at i, and its sense.
std::pair<std::size_t, int> rotation_chain(std::span<const Epc> e, std::size_t i) {
  int sense = 0;
  std::size_t j = i;
  while (j + 1 < e.size()) {
    const int s = rotation_step(e[j], e[j + 1]);
    if (s != 1 && s != -1) break;
    if (sense == 0) sense = s;
    if (s != sense) break;
    ++j;
  }
  return {j, sense};
}

Bpc half_occlusion(Epc centre, int sense) {
  if (centre == Epc::Valley) return sense > 0 ? Bpc::DownHalfOcclusion : Bpc::UpHalfOcclusion;
  return sense > 0 ? Bpc::RightHalfOcclusion : Bpc::LeftHalfOcclusion;
}

void emit_runs(std::span<const Epc> e, std::size_t begin, std::size_t end,
               std::vector<BpcSpan>& out) {
  std::size_t i = begin;
  while (i < end) {
    std::size_t j = i;
    while (j < end && e[j] == e[i]) ++j;
    const std::size_t n = j - i;
    const std::size_t groups = (n + 5) / 6;
    const std::size_t base = n / groups, extra = n % groups;
    std::size_t at = i;
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t len = base + (g < extra ? 1 : 0);
      out.push_back({simple_bpc(e[i]), at, at + len});
      at += len;
    }
    i = j;
  }
}

}  // namespace

std::vector<BpcSpan> compose_bpc(std::span<const Epc> e) {
  std::vector<BpcSpan> sweeps;
  std::size_t i = 0;
  while (i < e.size()) {
    const auto [j, sense] = rotation_chain(e, i);
    const std::size_t transitions = j - i;
    if (transitions >= 4) {
      sweeps.push_back({Bpc::Occlusion, i, j + 1});
      i = j + 1;
      continue;
    }
    bool taken = false;
    if (transitions >= 2) {
      for (std::size_t w = i; w + 2 <= j; ++w) {
        const Epc centre = e[w + 1];
        if (centre == Epc::Valley || centre == Epc::Shaft) {
          sweeps.push_back({half_occlusion(centre, sense), w, w + 3});
          i = w + 3;
          taken = true;
          break;
        }
      }
    }
    if (!taken) ++i;
  }

  std::vector<BpcSpan> out;
  std::size_t cursor = 0;
  for (const BpcSpan& s : sweeps) {
    emit_runs(e, cursor, s.begin, out);
    out.push_back(s);
    cursor = s.end;
  }
  emit_runs(e, cursor, e.size(), out);
  return out;
}

std::string handwriting_equation(const PerceptualSequence& seq, std::span<const BpcSpan> spans) {
  if (seq.items.empty() || spans.empty()) {
    throw std::invalid_argument("handwriting equation of an empty sequence");
  }
  std::size_t cursor = 0;
  std::string out = "handwriting={";
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const BpcSpan& s = spans[k];
    if (s.begin != cursor || s.end <= s.begin || s.end > seq.items.size()) {
      throw std::invalid_argument("BPC spans must tile the sequence (gap or overlap at item " +
                                  std::to_string(cursor) + ")");
    }
    if (k > 0) out += ", ";
    out += bpc_name(s.bpc);
    out += '[';
    for (std::size_t i = s.begin; i < s.end; ++i) {
      if (i > s.begin) out += ',';
      out += epc_abbreviation(seq.items[i].membership.dominant());
    }
    out += ']';
    cursor = s.end;
  }
  if (cursor != seq.items.size()) {
    throw std::invalid_argument("BPC spans stop at item " + std::to_string(cursor) + " of " +
                                std::to_string(seq.items.size()));
  }
  return out + "}";
}

}  // namespace betaink
