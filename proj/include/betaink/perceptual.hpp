#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "betaink/beta_elliptic.hpp"

namespace betaink {

/// Elementary perceptual codes. The enum order is the index order of
/// membership vectors.
enum class Epc { Valley = 0, LeftObliqueShaft = 1, Shaft = 2, RightObliqueShaft = 3 };

inline constexpr std::array<Epc, 4> kAllEpcs{Epc::Valley, Epc::LeftObliqueShaft, Epc::Shaft,
                                              Epc::RightObliqueShaft};

enum class Bpc {
  Valley,
  LeftObliqueShaft,
  Shaft,
  RightObliqueShaft,
  RightHalfOcclusion,
  LeftHalfOcclusion,
  UpHalfOcclusion,
  DownHalfOcclusion,
  Occlusion,
};

inline constexpr std::array<Bpc, 9> kAllBpcs{
    Bpc::Valley,           Bpc::LeftObliqueShaft,  Bpc::Shaft,
    Bpc::RightObliqueShaft, Bpc::RightHalfOcclusion, Bpc::LeftHalfOcclusion,
    Bpc::UpHalfOcclusion,  Bpc::DownHalfOcclusion, Bpc::Occlusion};

enum class BpcClass { Simple, Complex };

std::string_view epc_name(Epc e);
std::string_view epc_abbreviation(Epc e);
std::string_view bpc_name(Bpc b);
std::string_view bpc_abbreviation(Bpc b);
Bpc bpc_from_name(std::string_view name);
BpcClass bpc_class(Bpc b);
/// The simple BPC sharing an EPC's name.
Bpc simple_bpc(Epc e);

/// Position of an EPC in the order of increasing line angle modulo pi:
/// Valley 0, RightObliqueShaft 1, Shaft 2, LeftObliqueShaft 3.
int rotation_index(Epc e);

struct EpcMembership {
  std::array<double, 4> mu{};

  double operator[](Epc e) const { return mu[static_cast<std::size_t>(e)]; }
  Epc dominant() const;
  static EpcMembership uniform() { return {{0.25, 0.25, 0.25, 0.25}}; }
};

/// Four angular regions on (-pi/2, pi/2]: Valley around 0, RightObliqueShaft
/// around pi/4, Shaft around +-pi/2, LeftObliqueShaft around -pi/4. Adjacent
/// regions crossfade linearly over a band of width `overlap` centred on each
/// boundary (+-pi/8, +-3pi/8).
struct FuzzyRegions {
  double half_width = std::numbers::pi / 8;
  double overlap = std::numbers::pi / 16;

  void validate() const;
};

/// Throws std::domain_error for angles outside (-pi/2, pi/2].
EpcMembership epc_membership(double chord_angle, const FuzzyRegions& regions = {});

struct PerceptualItem {
  EpcMembership membership;
  double chord_angle = 0.0;
  std::optional<std::array<double, 10>> beta_features;
  bool degenerate = false;
  std::size_t pen_stroke = 0;
};

struct PerceptualSequence {
  std::vector<PerceptualItem> items;
  std::optional<std::string> label;

  std::vector<Epc> dominant_epcs() const;
};

PerceptualSequence encode_sequence(std::span<const ElliptiStroke> strokes,
                                   const FuzzyRegions& regions = {}, bool with_beta = false);

struct BpcSpan {
  Bpc bpc = Bpc::Valley;
  std::size_t begin = 0;  // half-open [begin, end) over the EPC list
  std::size_t end = 0;

  bool operator==(const BpcSpan&) const = default;
};

/// Rule-based grouping of an EPC string into BPCs, used to label synthetic
/// data. Monotone rotations of the line direction (consecutive EPCs one
/// region apart, same turning sense) become occlusions: four or more
/// transitions form a full Occlusion; otherwise three EPCs centred on Valley
/// or Shaft form a half occlusion whose side follows from the centre and the
/// turning sense. Everything else is split into runs of identical EPCs, each
/// run cut into ceil(n / 6) near-equal simple BPCs.
std::vector<BpcSpan> compose_bpc(std::span<const Epc> epcs);

/// Renders "handwriting={Name[e,e,...], ...}" with each BPC's dominant EPC
/// abbreviations. Spans must tile the sequence without gaps.
std::string handwriting_equation(const PerceptualSequence& seq, std::span<const BpcSpan> spans);

}  // namespace betaink
