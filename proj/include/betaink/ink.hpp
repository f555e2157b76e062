#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace betaink {

/// One pen sample. Coordinates are raw device units, time is seconds,
/// pen is 1 while the pen touches the surface and 0 when it is lifted.
struct InkPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  int pen = 1;

  bool operator==(const InkPoint&) const = default;
};

struct InkTrace {
  std::vector<InkPoint> points;
  std::optional<std::string> label;
  std::map<std::string, std::string> meta;

  bool operator==(const InkTrace&) const = default;
};

/// Maximal run of pen-down points, stored as the half-open index range
/// [begin, end) into the parent trace.
struct PenStroke {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  std::span<const InkPoint> points(const InkTrace& trace) const {
    return std::span<const InkPoint>(trace.points).subspan(begin, size());
  }
  bool operator==(const PenStroke&) const = default;
};

enum class InkFormat { Json, Text };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset);
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

InkFormat ink_format_from_name(std::string_view name);

/// Stable-sorts points by time and merges points sharing a timestamp
/// (x, y averaged, pen OR-ed). Throws ValidationError on non-finite values,
/// a pen value outside {0, 1}, or an empty point list.
InkTrace canonicalize(InkTrace trace);

std::vector<InkTrace> parse_ink(std::string_view bytes, InkFormat format);
std::string serialize_ink(std::span<const InkTrace> traces, InkFormat format);

std::vector<PenStroke> split_pen_strokes(const InkTrace& trace);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace betaink
