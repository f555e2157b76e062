#include <doctest.h>

#include <cmath>
#include <numbers>

#include "betaink/beta_elliptic.hpp"
#include "common/fixtures.hpp"
#include "helpers.hpp"

using namespace betaink;

TEST_SUITE("segment") {

TEST_CASE("one synthesized stroke gives exactly one elliptic stroke") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto strokes = fixtures::chain_strokes(seed, 1);
    const SegmentResult r = segment(synthesize_trace(strokes, 100.0));
    CHECK(r.strokes.size() == 1);
  }
}

TEST_CASE("K chained strokes segment into K with parameters within 10%") {
  for (int k = 2; k <= 8; ++k) {
    for (std::uint64_t s = 0; s < 6; ++s) {
      const auto truth = fixtures::chain_strokes(derive_seed({0x7365, static_cast<std::uint64_t>(k), s}), k);
      const SegmentResult r = segment(synthesize_trace(truth, 100.0));
      CAPTURE(k);
      CAPTURE(s);
      REQUIRE(r.strokes.size() == static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        const auto& got = r.strokes[static_cast<std::size_t>(i)];
        const auto& want = truth[static_cast<std::size_t>(i)];
        CHECK(testutil::rel(got.beta.p, want.beta.p) <= 0.1);
        CHECK(testutil::rel(got.beta.q, want.beta.q) <= 0.1);
        CHECK(testutil::rel(got.beta.amplitude, want.beta.amplitude) <= 0.1);
        CHECK(testutil::rel(got.arc.a, want.arc.a) <= 0.1);
        CHECK(testutil::rel(got.arc.b, want.arc.b) <= 0.1);
      }
    }
  }
}

TEST_CASE("constant-speed straight segment is one near-flat stroke") {
  const InkTrace line = testutil::line_trace(0, 0, 3, 1, 60);
  const SegmentResult r = segment(line);
  REQUIRE(r.strokes.size() == 1);
  const auto& s = r.strokes[0];
  CHECK(s.arc.b / s.arc.a < 0.05);
  CHECK(s.chord_angle == doctest::Approx(std::atan2(1.0, 3.0)));
}

TEST_CASE("beta points are ordered and H lies on the chord") {
  const auto truth = fixtures::chain_strokes(77, 4);
  const SegmentResult r = segment(synthesize_trace(truth, 100.0));
  for (const auto& s : r.strokes) {
    CHECK(s.points.m1.index < s.points.m2.index);
    CHECK(s.points.m2.index < s.points.m3.index);
    const double cx = s.points.m3.x - s.points.m1.x, cy = s.points.m3.y - s.points.m1.y;
    const double hx = s.points.h.x - s.points.m1.x, hy = s.points.h.y - s.points.m1.y;
    CHECK(std::abs(cx * hy - cy * hx) < 1e-9);
    const double mx = s.points.m2.x - s.points.h.x, my = s.points.m2.y - s.points.h.y;
    CHECK(std::abs(mx * cx + my * cy) < 1e-9);
  }
  for (std::size_t i = 1; i < r.strokes.size(); ++i) {
    CHECK(r.strokes[i].points.m1.index == r.strokes[i - 1].points.m3.index);
  }
}

TEST_CASE("pen lifts split strokes and tag their pen stroke") {
  InkTrace t = testutil::line_trace(0, 0, 1, 0, 30);
  InkTrace u = testutil::line_trace(0, 1, 1, 2, 30);
  t.points.push_back({1, 0.5, 0.30, 0});
  for (auto p : u.points) {
    p.t += 0.31;
    t.points.push_back(p);
  }
  const SegmentResult r = segment(t);
  REQUIRE(r.strokes.size() == 2);
  CHECK(r.strokes[0].pen_stroke == 0);
  CHECK(r.strokes[1].pen_stroke == 1);
  CHECK(r.strokes[1].points.m1.index == 31);
}

TEST_CASE("degenerate runs produce warnings rather than failures") {
  InkTrace t;
  t.points = {{0, 0, 0, 1}, {0, 0, 0.01, 1}, {0, 0, 0.02, 1}};
  SegmentResult r = segment(t);
  CHECK(r.strokes.empty());
  CHECK(r.warnings.size() == 1);
  t.points = {{0, 0, 0, 1}, {1, 0, 0.01, 1}};
  r = segment(t);
  REQUIRE(r.strokes.size() == 1);
  CHECK(r.strokes[0].degenerate);
}

TEST_CASE("parameters() lists the ten stroke parameters") {
  ElliptiStroke s;
  s.beta = {0.1, 0.4, 2.0, 3.0, 4.0};
  s.arc = {5, 6, 7, 8, 9, 0, 0};
  const auto p = s.parameters();
  const std::array<double, 10> want{2.0, 3.0, 0.1, 0.4, 4.0, 7, 8, 5, 6, 9};
  CHECK(p == want);
}

}  // TEST_SUITE
