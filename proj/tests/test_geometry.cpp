#include <doctest.h>

#include <numbers>

#include "ctxslam/geometry.hpp"
#include "ctxslam/random.hpp"
#include "oracles.hpp"

using namespace ctxslam;

namespace {

oracle::P2 to_p2(Vec2 v) { return {v.x, v.y}; }

}  // namespace

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(5 * pi) == doctest::Approx(pi));
}

TEST_CASE("signed area and hull orientation") {
  const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(sq) == doctest::Approx(1.0));
  const Polygon cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  CHECK(signed_area(cw) == doctest::Approx(-1.0));

  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0.5, 0.5}, {1, 1}, {0, 1}, {0.5, 0}};
  const Polygon h = convex_hull(pts);
  CHECK(h.size() == 4);
  CHECK(signed_area(h) == doctest::Approx(1.0));
}

TEST_CASE("convex hull of collinear points keeps the distinct points") {
  const std::vector<Vec2> pts{{0, 0}, {1, 1}, {2, 2}, {1, 1}};
  const Polygon h = convex_hull(pts);
  CHECK(h.size() <= 3);
  CHECK(diameter(pts) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("hull matches the brute-force edge oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(12));
    std::vector<Vec2> pts;
    std::vector<oracle::P2> ps;
    std::vector<std::size_t> ids;
    for (int i = 0; i < n; ++i) {
      pts.push_back({rng.uniform(), rng.uniform()});
      ps.push_back(to_p2(pts.back()));
      ids.push_back(static_cast<std::size_t>(i));
    }
    const Polygon h = convex_hull(pts);
    const auto edges = oracle::hull_edges(ps, ids);
    CHECK(edges.size() == h.size());
    // Every hull vertex is an input point; every input point is inside or on the hull.
    for (const Vec2 p : pts) CHECK(polygon_contains(h, p));
  }
}

TEST_CASE("point-in-polygon agrees with the winding oracle away from edges") {
  Rng rng(5);
  const Polygon star{{0.5, 0.0}, {0.6, 0.4}, {1.0, 0.5}, {0.6, 0.6},
                     {0.5, 1.0}, {0.4, 0.6}, {0.0, 0.5}, {0.4, 0.4}};
  std::vector<oracle::P2> ring;
  for (const Vec2 v : star) ring.push_back(to_p2(v));
  for (int i = 0; i < 2000; ++i) {
    const Vec2 p{rng.uniform(), rng.uniform()};
    CHECK(polygon_contains(star, p) == oracle::winding_contains(ring, to_p2(p)));
  }
}

TEST_CASE("segment intersection agrees with the orientation oracle") {
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    // A coarse lattice makes touching and collinear cases common.
    auto lat = [&] { return Vec2{static_cast<double>(rng.below(4)), static_cast<double>(rng.below(4))}; };
    const Vec2 a1 = lat(), a2 = lat(), b1 = lat(), b2 = lat();
    CHECK(segments_intersect(a1, a2, b1, b2) ==
          oracle::proper_or_touching(to_p2(a1), to_p2(a2), to_p2(b1), to_p2(b2)));
  }
}

TEST_CASE("hull distance") {
  const Polygon a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Polygon b{{3, 0}, {4, 0}, {4, 1}, {3, 1}};
  CHECK(hull_distance(a, b) == doctest::Approx(2.0));
  const Polygon c{{0.5, 0.5}, {2, 0.5}, {2, 2}};
  CHECK(hull_distance(a, c) == 0.0);
  const std::vector<Vec2> point{{0.5, 3.0}};
  CHECK(hull_distance(a, point) == doctest::Approx(2.0));
  const std::vector<Vec2> seg{{-1, 2}, {2, 2}};
  CHECK(hull_distance(a, seg) == doctest::Approx(1.0));
}

TEST_CASE("hull containment excludes degenerate hulls") {
  const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  CHECK(hull_contains(tri, {0.2, 0.2}));
  CHECK_FALSE(hull_contains(tri, {0.8, 0.8}));
  const Polygon seg{{0, 0}, {1, 0}};
  CHECK_FALSE(hull_contains(seg, {0.5, 0.0}));
}

TEST_CASE("closest point on a segment") {
  CHECK(point_segment_distance({0.5, 1.0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({2.0, 0.0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
  const Vec2 c = closest_point_on_segment({0.3, 5.0}, {0, 0}, {1, 0});
  CHECK(c.x == doctest::Approx(0.3));
  CHECK(c.y == doctest::Approx(0.0));
}

TEST_CASE("rng is reproducible and substreams are independent of order") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  CHECK(substream_seed(1, "agent", 0) != substream_seed(1, "agent", 1));
  CHECK(substream_seed(1, "agent", 0) == substream_seed(1, "agent", 0));
  CHECK(substream_seed(1, "agent", 0) != substream_seed(1, "sensor", 0));

  Rng r(3);
  double sum = 0.0, sq = 0.0;
  constexpr int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.05));
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
}
