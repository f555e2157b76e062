#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaink/beta_elliptic.hpp"
#include "betaink/perceptual.hpp"

namespace betaink {

/// JSON stroke record: {m1, m2, m3, h: {index, x, y, t}, theta (chord angle),
/// beta: {p, q, t0, t1, amp}, arc: {a, b, x0, y0, theta, arc_start, arc_end},
/// epc: [4 memberships], degenerate, pen_stroke}.
nlohmann::ordered_json stroke_record(const ElliptiStroke& s, const PerceptualItem& item);
nlohmann::ordered_json stroke_record(const ElliptiStroke& s, const FuzzyRegions& regions = {});
ElliptiStroke stroke_from_record(const nlohmann::json& j);

/// Sequence item: {mu: [4], angle, beta: [10]?}.
nlohmann::ordered_json sequence_item_record(const PerceptualItem& item);
PerceptualItem sequence_item_from_record(const nlohmann::json& j);

/// Segment files: array of {label, strokes: [stroke record]}.
struct StrokeFileEntry {
  std::optional<std::string> label;
  std::vector<ElliptiStroke> strokes;
};
std::string write_stroke_file(const std::vector<StrokeFileEntry>& entries);
std::vector<StrokeFileEntry> read_stroke_file(const std::string& text);

/// Sequence files: array of {label, items: [sequence item]}.
std::string write_sequence_file(const std::vector<PerceptualSequence>& seqs);
std::vector<PerceptualSequence> read_sequence_file(const std::string& text);

}  // namespace betaink
