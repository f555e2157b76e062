#include "betaink/ink.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace betaink {

using nlohmann::json;

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t offset)
    : std::runtime_error(what + " (line " + std::to_string(line) + ", byte " +
                         std::to_string(offset) + ")"),
      line_(line),
      offset_(offset) {}

InkFormat ink_format_from_name(std::string_view name) {
  if (name == "json") return InkFormat::Json;
  if (name == "text" || name == "txt") return InkFormat::Text;
  throw std::invalid_argument("unknown ink format '" + std::string(name) + "'");
}

namespace {

void validate_point(const InkPoint& p, std::size_t index) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t)) {
    throw ValidationError("point " + std::to_string(index) + " has a non-finite coordinate");
  }
  if (p.pen != 0 && p.pen != 1) {
    throw ValidationError("point " + std::to_string(index) + " has pen value " +
                          std::to_string(p.pen));
  }
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_real(std::string_view tok, std::size_t line, std::size_t offset) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError("malformed number '" + std::string(tok) + "'", line, offset);
  }
  return v;
}

class TextReader {
 public:
  explicit TextReader(std::string_view bytes) : bytes_(bytes) {}

  std::vector<InkTrace> run() {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= bytes_.size()) {
      std::size_t eol = bytes_.find('\n', pos);
      if (eol == std::string_view::npos) eol = bytes_.size();
      ++line_no;
      consume(bytes_.substr(pos, eol - pos), line_no, pos);
      if (eol == bytes_.size()) break;
      pos = eol + 1;
    }
    finish_trace(line_no, bytes_.size());
    return std::move(traces_);
  }

 private:
  void consume(std::string_view line, std::size_t line_no, std::size_t offset) {
    if (is_blank(line)) {
      finish_trace(line_no, offset);
      return;
    }
    std::string_view body = trim(line);
    if (body.front() == '#') return;
    if (body.front() == '@') {
      header(body, line_no, offset);
      return;
    }
    auto toks = split_ws(body);
    if (toks.size() != 4) {
      throw ParseError("data line needs 4 fields 'x y t pen', got " + std::to_string(toks.size()),
                       line_no, offset);
    }
    InkPoint p;
    p.x = parse_real(toks[0], line_no, offset);
    p.y = parse_real(toks[1], line_no, offset);
    p.t = parse_real(toks[2], line_no, offset);
    if (toks[3] == "0") {
      p.pen = 0;
    } else if (toks[3] == "1") {
      p.pen = 1;
    } else {
      throw ParseError("pen field must be 0 or 1, got '" + std::string(toks[3]) + "'", line_no,
                       offset);
    }
    open_ = true;
    current_.points.push_back(p);
  }

  void header(std::string_view body, std::size_t line_no, std::size_t offset) {
    auto space = body.find_first_of(" \t");
    std::string_view key = body.substr(0, space);
    std::string_view rest = space == std::string_view::npos ? std::string_view{} : body.substr(space);
    rest = trim(rest);
    if (key == "@label") {
      current_.label = std::string(rest);
    } else if (key == "@meta") {
      auto sp = rest.find_first_of(" \t");
      if (rest.empty()) throw ParseError("@meta needs a key", line_no, offset);
      std::string k(rest.substr(0, sp));
      std::string v(sp == std::string_view::npos ? std::string_view{} : trim(rest.substr(sp)));
      current_.meta[k] = v;
    } else {
      throw ParseError("unknown header '" + std::string(key) + "'", line_no, offset);
    }
    open_ = true;
  }

  void finish_trace(std::size_t line_no, std::size_t offset) {
    if (!open_) return;
    if (current_.points.empty()) {
      throw ValidationError("trace ending at line " + std::to_string(line_no) + " (byte " +
                            std::to_string(offset) + ") has no points");
    }
    traces_.push_back(canonicalize(std::move(current_)));
    current_ = InkTrace{};
    open_ = false;
  }

  std::string_view bytes_;
  std::vector<InkTrace> traces_;
  InkTrace current_;
  bool open_ = false;
};

std::vector<InkTrace> parse_json(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    std::size_t byte = e.byte;
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(bytes.begin(),
                                          bytes.begin() + std::min(byte, bytes.size()), '\n'));
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, byte);
  }
  if (!doc.is_array()) throw ParseError("top-level JSON value must be an array", 1, 0);

  std::vector<InkTrace> out;
  out.reserve(doc.size());
  for (std::size_t ti = 0; ti < doc.size(); ++ti) {
    const json& rec = doc[ti];
    auto fail = [&](const std::string& msg) {
      throw ParseError("trace " + std::to_string(ti) + ": " + msg, 0, 0);
    };
    if (!rec.is_object()) fail("record must be an object");
    InkTrace trace;
    if (auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) fail("label must be a string or null");
      trace.label = it->get<std::string>();
    }
    if (auto it = rec.find("meta"); it != rec.end() && !it->is_null()) {
      if (!it->is_object()) fail("meta must be an object");
      for (auto& [k, v] : it->items()) {
        if (!v.is_string()) fail("meta value for '" + k + "' must be a string");
        trace.meta[k] = v.get<std::string>();
      }
    }
    auto pts = rec.find("points");
    if (pts == rec.end() || !pts->is_array()) fail("missing 'points' array");
    if (pts->empty()) throw ValidationError("trace " + std::to_string(ti) + " has no points");
    trace.points.reserve(pts->size());
    for (std::size_t pi = 0; pi < pts->size(); ++pi) {
      const json& p = (*pts)[pi];
      if (!p.is_object()) fail("point " + std::to_string(pi) + " must be an object");
      InkPoint ip;
      for (auto [name, dst] : {std::pair{"x", &ip.x}, std::pair{"y", &ip.y}, std::pair{"t", &ip.t}}) {
        auto f = p.find(name);
        if (f == p.end() || !f->is_number()) {
          fail("point " + std::to_string(pi) + " field '" + name + "' must be a number");
        }
        *dst = f->get<double>();
      }
      auto pen = p.find("pen");
      if (pen == p.end() || !pen->is_number_integer()) {
        fail("point " + std::to_string(pi) + " field 'pen' must be 0 or 1");
      }
      ip.pen = pen->get<int>();
      trace.points.push_back(ip);
    }
    out.push_back(canonicalize(std::move(trace)));
  }
  return out;
}

std::string serialize_text(std::span<const InkTrace> traces) {
  std::string out = "# betaink text ink v1: x y t pen\n";
  for (const InkTrace& tr : traces) {
    if (tr.label) {
      if (tr.label->find('\n') != std::string::npos) {
        throw ValidationError("label with a newline cannot be written as text ink");
      }
      out += "@label " + *tr.label + "\n";
    }
    for (const auto& [k, v] : tr.meta) {
      if (k.empty() || k.find_first_of(" \t\n") != std::string::npos ||
          v.find('\n') != std::string::npos) {
        throw ValidationError("meta entry '" + k + "' cannot be written as text ink");
      }
      out += "@meta " + k + " " + v + "\n";
    }
    for (const InkPoint& p : tr.points) {
      out += format_real(p.x);
      out += ' ';
      out += format_real(p.y);
      out += ' ';
      out += format_real(p.t);
      out += p.pen ? " 1\n" : " 0\n";
    }
    out += '\n';
  }
  return out;
}

std::string serialize_json(std::span<const InkTrace> traces) {
  json doc = json::array();
  for (const InkTrace& tr : traces) {
    json rec;
    rec["label"] = tr.label ? json(*tr.label) : json(nullptr);
    rec["meta"] = json::object();
    for (const auto& [k, v] : tr.meta) rec["meta"][k] = v;
    json pts = json::array();
    for (const InkPoint& p : tr.points) {
      pts.push_back({{"x", p.x}, {"y", p.y}, {"t", p.t}, {"pen", p.pen}});
    }
    rec["points"] = std::move(pts);
    doc.push_back(std::move(rec));
  }
  return doc.dump() + "\n";
}

}  // namespace

InkTrace canonicalize(InkTrace trace) {
  if (trace.points.empty()) throw ValidationError("trace has no points");
  for (std::size_t i = 0; i < trace.points.size(); ++i) validate_point(trace.points[i], i);

  std::stable_sort(trace.points.begin(), trace.points.end(),
                   [](const InkPoint& a, const InkPoint& b) { return a.t < b.t; });

  std::vector<InkPoint> merged;
  merged.reserve(trace.points.size());
  std::size_t i = 0;
  while (i < trace.points.size()) {
    std::size_t j = i + 1;
    while (j < trace.points.size() && trace.points[j].t == trace.points[i].t) ++j;
    if (j == i + 1) {
      merged.push_back(trace.points[i]);
    } else {
      InkPoint m{0.0, 0.0, trace.points[i].t, 0};
      for (std::size_t k = i; k < j; ++k) {
        m.x += trace.points[k].x;
        m.y += trace.points[k].y;
        m.pen |= trace.points[k].pen;
      }
      m.x /= static_cast<double>(j - i);
      m.y /= static_cast<double>(j - i);
      merged.push_back(m);
    }
    i = j;
  }
  trace.points = std::move(merged);
  return trace;
}

std::vector<InkTrace> parse_ink(std::string_view bytes, InkFormat format) {
  if (format == InkFormat::Json) return parse_json(bytes);
  return TextReader(bytes).run();
}

std::string serialize_ink(std::span<const InkTrace> traces, InkFormat format) {
  return format == InkFormat::Json ? serialize_json(traces) : serialize_text(traces);
}

std::vector<PenStroke> split_pen_strokes(const InkTrace& trace) {
  std::vector<PenStroke> out;
  const auto& pts = trace.points;
  std::size_t i = 0;
  while (i < pts.size()) {
    if (pts[i].pen != 1) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < pts.size() && pts[j].pen == 1) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace betaink
