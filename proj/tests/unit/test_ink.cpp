#include <doctest.h>

#include <string>

#include "betaink/ink.hpp"
#include "helpers.hpp"

using namespace betaink;

TEST_SUITE("ink") {

TEST_CASE("text data line maps fields directly") {
  const auto traces = parse_ink("10 20 0.00 1\n", InkFormat::Text);
  REQUIRE(traces.size() == 1);
  REQUIRE(traces[0].points.size() == 1);
  CHECK(traces[0].points[0] == InkPoint{10, 20, 0.0, 1});
}

TEST_CASE("headers, comments and blank-line separated traces") {
  const std::string text =
      "# corpus\n@label 7\n@meta writer w01\n0 0 0 1\n1 1 0.01 1\n\n@label a\n5 5 1 0\n";
  const auto traces = parse_ink(text, InkFormat::Text);
  REQUIRE(traces.size() == 2);
  CHECK(traces[0].label == "7");
  CHECK(traces[0].meta.at("writer") == "w01");
  CHECK(traces[0].points.size() == 2);
  CHECK(traces[1].label == "a");
  CHECK(traces[1].points[0].pen == 0);
}

TEST_CASE("empty point list is a validation error") {
  CHECK_THROWS_AS(parse_ink("@label 3\n\n", InkFormat::Text), ValidationError);
  CHECK_THROWS_AS(parse_ink(R"([{"label":"3","meta":{},"points":[]}])", InkFormat::Json),
                  ValidationError);
}

TEST_CASE("malformed records report their line") {
  try {
    parse_ink("0 0 0 1\n1 x 0.1 1\n", InkFormat::Text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.offset() == 8);
  }
  CHECK_THROWS_AS(parse_ink("0 0 0 2\n", InkFormat::Text), ParseError);
  CHECK_THROWS_AS(parse_ink("0 0 0\n", InkFormat::Text), ParseError);
  CHECK_THROWS_AS(parse_ink("[{\"points\": [}", InkFormat::Json), ParseError);
  CHECK_THROWS_AS(parse_ink("{}", InkFormat::Json), ParseError);
}

TEST_CASE("non-finite coordinates are rejected") {
  CHECK_THROWS_AS(parse_ink("nan 0 0 1\n", InkFormat::Text), std::exception);
  InkTrace t;
  t.points = {{0, 0, 0, 1}, {std::nan(""), 0, 1, 1}};
  CHECK_THROWS_AS(canonicalize(t), ValidationError);
}

TEST_CASE("canonicalize sorts by time and merges duplicate timestamps") {
  InkTrace t;
  t.points = {{4, 4, 0.2, 1}, {0, 0, 0.0, 0}, {2, 6, 0.0, 1}, {9, 9, 0.1, 1}};
  const InkTrace c = canonicalize(t);
  REQUIRE(c.points.size() == 3);
  CHECK(c.points[0] == InkPoint{1, 3, 0.0, 1});
  CHECK(c.points[1].t == 0.1);
  CHECK(c.points[2].t == 0.2);
}

TEST_CASE("serialize writes one header and one data line for a single point") {
  InkTrace t;
  t.label = "7";
  t.points = {{1.5, -2, 0.25, 1}};
  const std::string text = serialize_ink(std::span(&t, 1), InkFormat::Text);
  CHECK(text.find("@label 7") != std::string::npos);
  int data_lines = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line[0] != '@' && line[0] != '#') ++data_lines;
    pos = eol == std::string::npos ? text.size() : eol + 1;
  }
  CHECK(data_lines == 1);
  CHECK(serialize_ink(std::span(&t, 1), InkFormat::Json).find("\"label\"") != std::string::npos);
}

TEST_CASE("parse(serialize(T)) == T for random traces in both formats") {
  Rng rng(11);
  std::vector<InkTrace> corpus;
  for (int i = 0; i < 1000; ++i) {
    InkTrace t = testutil::random_trace(rng, 1 + static_cast<int>(rng.below(40)));
    if (i % 3 != 0) t.label = "c" + std::to_string(rng.below(10));
    if (i % 5 == 0) t.meta["writer"] = "w" + std::to_string(i);
    corpus.push_back(std::move(t));
  }
  for (InkFormat f : {InkFormat::Json, InkFormat::Text}) {
    CAPTURE(static_cast<int>(f));
    const auto back = parse_ink(serialize_ink(corpus, f), f);
    REQUIRE(back.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) REQUIRE(back[i] == corpus[i]);
  }
}

TEST_CASE("split_pen_strokes") {
  InkTrace t;
  t.points = {{0, 0, 0, 1}, {1, 0, 1, 1}, {2, 0, 2, 0}, {3, 0, 3, 1}};
  const auto s = split_pen_strokes(t);
  REQUIRE(s.size() == 2);
  CHECK(s[0].size() == 2);
  CHECK(s[1].size() == 1);

  const InkTrace all = testutil::line_trace(0, 0, 1, 1, 7);
  const auto one = split_pen_strokes(all);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == PenStroke{0, 7});

  InkTrace up;
  up.points = {{0, 0, 0, 0}, {1, 1, 1, 0}};
  CHECK(split_pen_strokes(up).empty());
}

TEST_CASE("split_pen_strokes covers exactly the pen-down points with maximal runs") {
  Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    const InkTrace t = testutil::random_trace(rng, 1 + static_cast<int>(rng.below(30)));
    const auto runs = split_pen_strokes(t);
    std::vector<int> covered(t.points.size(), 0);
    std::size_t prev_end = 0;
    for (const PenStroke& r : runs) {
      REQUIRE(r.begin < r.end);
      REQUIRE(r.begin >= prev_end);
      for (std::size_t i = r.begin; i < r.end; ++i) {
        REQUIRE(t.points[i].pen == 1);
        covered[i] = 1;
      }
      if (r.begin > 0) REQUIRE(t.points[r.begin - 1].pen == 0);
      if (r.end < t.points.size()) REQUIRE(t.points[r.end].pen == 0);
      prev_end = r.end;
    }
    for (std::size_t i = 0; i < t.points.size(); ++i) REQUIRE(covered[i] == t.points[i].pen);
  }
}

}  // TEST_SUITE
