#include "betaink/records.hpp"

#include <stdexcept>

namespace betaink {

using ojson = nlohmann::ordered_json;

namespace {

ojson point_record(const BetaPoint& p) {
  return {{"index", p.index}, {"x", p.x}, {"y", p.y}, {"t", p.t}};
}

BetaPoint point_from_record(const nlohmann::json& j) {
  return {j.at("index").get<std::size_t>(), j.at("x").get<double>(), j.at("y").get<double>(),
          j.at("t").get<double>()};
}

ojson optional_label(const std::optional<std::string>& l) {
  return l ? ojson(*l) : ojson(nullptr);
}

std::optional<std::string> label_from(const nlohmann::json& j) {
  if (!j.contains("label") || j["label"].is_null()) return std::nullopt;
  return j["label"].get<std::string>();
}

nlohmann::json parse_array(const std::string& text, const char* what) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": top level must be an array");
  return j;
}

}  // namespace

ojson stroke_record(const ElliptiStroke& s, const PerceptualItem& item) {
  ojson r;
  r["m1"] = point_record(s.points.m1);
  r["m2"] = point_record(s.points.m2);
  r["m3"] = point_record(s.points.m3);
  r["h"] = point_record(s.points.h);
  r["theta"] = s.chord_angle;
  r["beta"] = {{"p", s.beta.p}, {"q", s.beta.q}, {"t0", s.beta.t0}, {"t1", s.beta.t1},
               {"amp", s.beta.amplitude}};
  r["arc"] = {{"a", s.arc.a},         {"b", s.arc.b},
              {"x0", s.arc.x0},       {"y0", s.arc.y0},
              {"theta", s.arc.theta}, {"arc_start", s.arc.arc_start},
              {"arc_end", s.arc.arc_end}};
  r["epc"] = item.membership.mu;
  r["degenerate"] = s.degenerate;
  r["pen_stroke"] = s.pen_stroke;
  return r;
}

ojson stroke_record(const ElliptiStroke& s, const FuzzyRegions& regions) {
  PerceptualItem item;
  item.membership = s.degenerate ? EpcMembership::uniform() : epc_membership(s.chord_angle, regions);
  return stroke_record(s, item);
}

ElliptiStroke stroke_from_record(const nlohmann::json& j) {
  ElliptiStroke s;
  s.points.m1 = point_from_record(j.at("m1"));
  s.points.m2 = point_from_record(j.at("m2"));
  s.points.m3 = point_from_record(j.at("m3"));
  s.points.h = point_from_record(j.at("h"));
  s.chord_angle = j.at("theta").get<double>();
  const auto& b = j.at("beta");
  s.beta = {b.at("t0").get<double>(), b.at("t1").get<double>(), b.at("p").get<double>(),
            b.at("q").get<double>(), b.at("amp").get<double>()};
  const auto& a = j.at("arc");
  s.arc.a = a.at("a").get<double>();
  s.arc.b = a.at("b").get<double>();
  s.arc.x0 = a.at("x0").get<double>();
  s.arc.y0 = a.at("y0").get<double>();
  s.arc.theta = a.at("theta").get<double>();
  s.arc.arc_start = a.value("arc_start", 0.0);
  s.arc.arc_end = a.value("arc_end", 0.0);
  s.degenerate = j.value("degenerate", false);
  s.pen_stroke = j.value("pen_stroke", std::size_t{0});
  return s;
}

ojson sequence_item_record(const PerceptualItem& item) {
  ojson r;
  r["mu"] = item.membership.mu;
  r["angle"] = item.chord_angle;
  if (item.beta_features) r["beta"] = *item.beta_features;
  return r;
}

PerceptualItem sequence_item_from_record(const nlohmann::json& j) {
  PerceptualItem item;
  item.membership.mu = j.at("mu").get<std::array<double, 4>>();
  item.chord_angle = j.at("angle").get<double>();
  if (j.contains("beta")) item.beta_features = j["beta"].get<std::array<double, 10>>();
  return item;
}

std::string write_stroke_file(const std::vector<StrokeFileEntry>& entries) {
  ojson arr = ojson::array();
  for (const auto& e : entries) {
    ojson strokes = ojson::array();
    for (const auto& s : e.strokes) strokes.push_back(stroke_record(s));
    arr.push_back({{"label", optional_label(e.label)}, {"strokes", std::move(strokes)}});
  }
  return arr.dump(1) + "\n";
}

std::vector<StrokeFileEntry> read_stroke_file(const std::string& text) {
  std::vector<StrokeFileEntry> out;
  for (const auto& e : parse_array(text, "stroke file")) {
    StrokeFileEntry entry;
    entry.label = label_from(e);
    for (const auto& s : e.at("strokes")) entry.strokes.push_back(stroke_from_record(s));
    out.push_back(std::move(entry));
  }
  return out;
}

std::string write_sequence_file(const std::vector<PerceptualSequence>& seqs) {
  ojson arr = ojson::array();
  for (const auto& s : seqs) {
    ojson items = ojson::array();
    for (const auto& it : s.items) items.push_back(sequence_item_record(it));
    arr.push_back({{"label", optional_label(s.label)}, {"items", std::move(items)}});
  }
  return arr.dump(1) + "\n";
}

std::vector<PerceptualSequence> read_sequence_file(const std::string& text) {
  std::vector<PerceptualSequence> out;
  for (const auto& e : parse_array(text, "sequence file")) {
    PerceptualSequence seq;
    seq.label = label_from(e);
    for (const auto& it : e.at("items")) seq.items.push_back(sequence_item_from_record(it));
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace betaink
