#include <doctest.h>

#include <cmath>
#include <numbers>

#include "betaink/augment.hpp"
#include "betaink/noise.hpp"
#include "betaink/preprocess.hpp"
#include "helpers.hpp"

using namespace betaink;

namespace {

InkTrace append_points(InkTrace t, const std::vector<std::pair<double, double>>& xy, bool front) {
  std::vector<InkPoint> extra;
  for (auto [x, y] : xy) extra.push_back({x, y, 0.0, 1});
  if (front) {
    t.points.insert(t.points.begin(), extra.begin(), extra.end());
  } else {
    t.points.insert(t.points.end(), extra.begin(), extra.end());
  }
  for (std::size_t i = 0; i < t.points.size(); ++i) t.points[i].t = 0.01 * static_cast<double>(i);
  return t;
}

std::vector<std::pair<double, double>> hook(double x, double y, double heading_deg, int n, double step) {
  std::vector<std::pair<double, double>> out;
  const double a = heading_deg * std::numbers::pi / 180.0;
  for (int i = 1; i <= n; ++i) out.push_back({x + i * step * std::cos(a), y + i * step * std::sin(a)});
  return out;
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("config validation") {
  PreprocessConfig c;
  CHECK_NOTHROW(c.validate());
  c.filter_cutoff_hz = 50.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.dehook_arc_fraction = 0.3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.resample_hz = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("two-point line over 1 s resamples to 101 collinear points") {
  InkTrace t;
  t.points = {{0, 0, 0, 1}, {3, 4, 1.0, 1}};
  const InkTrace r = interpolate(t, {});
  REQUIRE(r.points.size() == 101);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const double u = static_cast<double>(i) / 100.0;
    CHECK(r.points[i].t == doctest::Approx(u).epsilon(1e-12));
    CHECK(r.points[i].x == doctest::Approx(3 * u).epsilon(1e-9));
    CHECK(r.points[i].y == doctest::Approx(4 * u).epsilon(1e-9));
  }
  CHECK(r.points.back().x == 3.0);
  CHECK(r.points.back().y == 4.0);
}

TEST_CASE("uniform trace at the target rate is unchanged") {
  InkTrace t;
  for (int i = 0; i <= 50; ++i) t.points.push_back({std::cos(i * 0.1), std::sin(i * 0.1), i / 100.0, 1});
  const InkTrace r = interpolate(t, {});
  REQUIRE(r.points.size() == t.points.size());
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    CHECK(std::abs(r.points[i].x - t.points[i].x) < 1e-9);
    CHECK(std::abs(r.points[i].y - t.points[i].y) < 1e-9);
    CHECK(std::abs(r.points[i].t - t.points[i].t) < 1e-9);
  }
}

TEST_CASE("irregularly sampled sine is recovered within 1e-3") {
  Rng rng(17);
  InkTrace t;
  double time = 0.0;
  while (time < 2.0) {
    t.points.push_back({time, std::sin(2 * std::numbers::pi * time), time, 1});
    time += rng.uniform(0.005, 0.02);
  }
  const InkTrace r = interpolate(t, {});
  double worst = 0.0;
  for (const InkPoint& p : r.points) {
    worst = std::max(worst, std::abs(p.y - std::sin(2 * std::numbers::pi * p.t)));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("pen-up stretches collapse to one transition point") {
  InkTrace t;
  t.points = {{0, 0, 0, 1}, {1, 0, 0.1, 1}, {1, 1, 0.2, 0}, {2, 1, 0.3, 0}, {3, 1, 0.4, 1}, {4, 1, 0.5, 1}};
  const InkTrace r = interpolate(t, {});
  const auto runs = split_pen_strokes(r);
  REQUIRE(runs.size() == 2);
  CHECK(runs[1].begin - runs[0].end == 1);
}

TEST_CASE("a 3-point 120 degree hook at the end is removed and the body kept") {
  const InkTrace body = testutil::line_trace(0, 0, 1, 0, 101);
  const InkTrace hooked = append_points(body, hook(1, 0, 120, 3, 0.01), false);
  const InkTrace d = dehook(hooked, {});
  REQUIRE(d.points.size() == body.points.size());
  for (std::size_t i = 0; i < body.points.size(); ++i) {
    CHECK(d.points[i].x == body.points[i].x);
    CHECK(d.points[i].y == body.points[i].y);
  }
}

TEST_CASE("hooks at both ends are both removed") {
  const InkTrace body = testutil::line_trace(0, 0, 1, 0, 101);
  auto head = hook(0, 0, -60, 3, 0.01);
  std::reverse(head.begin(), head.end());
  InkTrace t = append_points(body, head, true);
  t = append_points(t, hook(1, 0, 120, 3, 0.01), false);
  const InkTrace d = dehook(t, {});
  REQUIRE(d.points.size() == body.points.size());
  CHECK(d.points.front().x == 0.0);
  CHECK(d.points.back().x == doctest::Approx(1.0));
  CHECK(d.points.back().y == 0.0);
}

TEST_CASE("hook-free arcs and short strokes are untouched") {
  InkTrace arc;
  for (int i = 0; i <= 100; ++i) {
    const double a = std::numbers::pi * i / 100.0;
    arc.points.push_back({std::cos(a), std::sin(a), i / 100.0, 1});
  }
  CHECK(dehook(arc, {}) == arc);
  InkTrace tiny;
  tiny.points = {{0, 0, 0, 1}, {1, 0, 0.01, 1}, {0, 0.1, 0.02, 1}};
  CHECK(dehook(tiny, {}) == tiny);
}

TEST_CASE("40 Hz tremble on a trace loses at least 90% of its amplitude") {
  InkTrace t;
  for (int i = 0; i <= 300; ++i) {
    const double time = i / 100.0;
    t.points.push_back({time, 0.05 * std::sin(2 * std::numbers::pi * 40.0 * time), time, 1});
  }
  const InkTrace f = lowpass(t, {});
  const double before = 0.05;
  double after = 0.0;
  for (std::size_t i = 50; i < 250; ++i) after = std::max(after, std::abs(f.points[i].y));
  CHECK(after <= 0.1 * before);
}

TEST_CASE("normalize centres and scales to unit height") {
  InkTrace sq;
  sq.points = {{0, 0, 0, 1}, {1, 0, 1, 1}, {1, 1, 2, 1}, {0, 1, 3, 1}};
  const InkTrace n = normalize(sq, {});
  CHECK(n.points[0].x == doctest::Approx(-0.5));
  CHECK(n.points[2].y == doctest::Approx(0.5));

  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    InkTrace t = testutil::random_trace(rng, 5 + static_cast<int>(rng.below(50)));
    t.points[0].pen = 1;
    t.points[1].pen = 1;
    t.points[1].y = t.points[0].y + 1.0;
    const InkTrace a = normalize(t, {});
    CHECK(bounding_box(a).height() == doctest::Approx(1.0).epsilon(1e-9));
    InkTrace big = t;
    for (InkPoint& p : big.points) {
      p.x *= 5;
      p.y *= 5;
    }
    const InkTrace b = normalize(big, {});
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      REQUIRE(std::abs(a.points[i].x - b.points[i].x) < 1e-9);
      REQUIRE(std::abs(a.points[i].y - b.points[i].y) < 1e-9);
    }
  }
}

TEST_CASE("flat and point traces fall back to width or translation") {
  const InkTrace flat = testutil::line_trace(2, 3, 6, 3, 5);
  const InkTrace n = normalize(flat, {});
  CHECK(n.points.front().x == doctest::Approx(-0.5));
  CHECK(n.points.back().x == doctest::Approx(0.5));
  InkTrace dot;
  dot.points = {{4, 4, 0, 1}, {4, 4, 1, 1}};
  const InkTrace d = normalize(dot, {});
  CHECK(d.points[0].x == 0.0);
  CHECK(d.points[0].y == 0.0);
}

}  // TEST_SUITE
