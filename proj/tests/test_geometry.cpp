#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jigsawbench/geometry.hpp"
#include "jigsawbench/oracles.hpp"
#include "jigsawbench/rng.hpp"

using namespace jigsawbench;
using geom::Polygon;
using geom::Pose2;
using geom::Rect;
using geom::Vec2;

namespace {

Polygon square(double side, Vec2 origin = {0.0, 0.0}) {
  return Polygon{{origin,
                  origin + Vec2{side, 0.0},
                  origin + Vec2{side, side},
                  origin + Vec2{0.0, side}}};
}

}  // namespace

TEST_CASE("polygon_area basics") {
  CHECK(geom::polygon_area(square(1.0)) == Catch::Approx(1.0));
  const Polygon collinear{{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}};
  CHECK(geom::polygon_area(collinear) == Catch::Approx(0.0).margin(1e-12));
  const Polygon plate{{{0.0, 0.0}, {140.0, 0.0}, {140.0, 198.0}, {0.0, 198.0}}};
  CHECK(geom::polygon_area(plate) == Catch::Approx(27720.0));
}

TEST_CASE("transform identity, rotation and translation") {
  const Polygon sq = square(10.0);
  const Polygon same = geom::transform(sq, Pose2{});
  for (std::size_t i = 0; i < sq.size(); ++i) {
    CHECK(same[i].x == Catch::Approx(sq[i].x));
    CHECK(same[i].y == Catch::Approx(sq[i].y));
  }
  const Polygon rotated = geom::transform(sq, Pose2::make(0.0, 0.0, geom::kPi / 2));
  CHECK(geom::polygon_area(rotated) == Catch::Approx(geom::polygon_area(sq)));
  const Polygon moved = geom::transform(sq, Pose2{10.0, 20.0, 0.0});
  for (std::size_t i = 0; i < sq.size(); ++i) {
    CHECK(moved[i].x == Catch::Approx(sq[i].x + 10.0));
    CHECK(moved[i].y == Catch::Approx(sq[i].y + 20.0));
  }
}

TEST_CASE("transform preserves area for random poses") {
  rng::Stream s(101);
  for (int i = 0; i < 200; ++i) {
    Polygon p = oracles::detail::random_star(s);
    const Pose2 pose{s.uniform(-100, 100), s.uniform(-100, 100), s.uniform(-3.1, 3.1)};
    const double a0 = geom::polygon_area(p);
    const double a1 = geom::polygon_area(geom::transform(p, pose));
    CHECK(std::abs(a1 - a0) <= 1e-9 * std::max(1.0, std::abs(a0)));
  }
}

TEST_CASE("rect_iou identities and closed-form overlap") {
  const Rect a{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(geom::rect_iou(a, a) == Catch::Approx(1.0));
  const Rect apart{{5.0, 5.0}, {6.0, 6.0}};
  CHECK(geom::rect_iou(a, apart) == 0.0);
  const Rect shifted{{0.5, 0.0}, {1.5, 1.0}};
  CHECK(geom::rect_iou(a, shifted) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("rect_iou properties on random rects") {
  rng::Stream s(7);
  for (int i = 0; i < 500; ++i) {
    const Rect a = oracles::detail::random_rect(s);
    const Rect b = oracles::detail::random_rect(s);
    const double ab = geom::rect_iou(a, b);
    CHECK(ab == geom::rect_iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("polygon_intersection_area identity and disjoint") {
  const Polygon sq = square(4.0);
  CHECK(geom::polygon_intersection_area(sq, sq) == Catch::Approx(16.0));
  CHECK(geom::polygon_intersection_area(sq, square(2.0, {10.0, 10.0})) == 0.0);
}

TEST_CASE("polygon_intersection_area matches Monte-Carlo on convex pairs") {
  // 200 random convex pairs vs a 1e6-sample estimate, within 1% of the
  // sampled bounding area. Uses the winding oracle for the hit test.
  const auto rep = oracles::oracle_clip_mc(200, 20240517, 100000);
  INFO("max discrepancy " << rep.max_discrepancy);
  CHECK(rep.max_discrepancy < 0.01);
}

TEST_CASE("polygon_intersection_area bounded by min area and symmetric") {
  rng::Stream s(33);
  for (int i = 0; i < 200; ++i) {
    const Polygon a = oracles::detail::random_convex(s);
    const Polygon b = oracles::detail::random_star(s);
    const double ab = geom::polygon_intersection_area(a, b);
    const double ba = geom::polygon_intersection_area(b, a);
    CHECK(std::abs(ab - ba) < 1e-6);
    CHECK(ab <= std::min(geom::polygon_area(a), geom::polygon_area(b)) + 1e-6);
  }
}

TEST_CASE("convex_hull basics") {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const Polygon hull = geom::convex_hull(pts);
  CHECK(hull.size() == 4);
  CHECK(geom::polygon_area(hull) == Catch::Approx(1.0));

  const std::vector<Vec2> tri{{0, 0}, {4, 0}, {0, 3}};
  CHECK(geom::convex_hull(tri).size() == 3);
}

TEST_CASE("convex_hull contains every input point") {
  rng::Stream s(99);
  for (int i = 0; i < 100; ++i) {
    const auto pts = oracles::detail::random_cloud(s);
    const Polygon hull = geom::convex_hull(pts);
    if (hull.size() < 3) continue;
    for (const Vec2 p : pts) {
      CHECK(geom::polygon_contains_point(hull, p));
    }
  }
}

TEST_CASE("min_area_rect on an axis-aligned rectangle") {
  const std::vector<Vec2> pts{{0, 0}, {8, 0}, {8, 3}, {0, 3}};
  const geom::OrientedRect r = geom::min_area_rect(pts);
  CHECK(r.area() == Catch::Approx(24.0));
  const double mod = std::fmod(std::abs(r.theta), geom::kPi / 2);
  CHECK((mod < 1e-9 || std::abs(mod - geom::kPi / 2) < 1e-9));
}

TEST_CASE("min_area_rect invariant under rotation") {
  std::vector<Vec2> pts{{0, 0}, {8, 0}, {8, 3}, {0, 3}};
  const double a0 = geom::min_area_rect(pts).area();
  const Pose2 rot = Pose2::make(0.0, 0.0, 30.0 * geom::kPi / 180.0);
  std::vector<Vec2> rotated;
  for (const Vec2 p : pts) rotated.push_back(rot.apply(p));
  CHECK(geom::min_area_rect(rotated).area() == Catch::Approx(a0));
}

TEST_CASE("min_area_rect vs angle-sweep oracle") {
  const auto rep = oracles::oracle_mbr_sweep(100, 424242);
  INFO("max relative diff " << rep.max_discrepancy);
  CHECK(rep.max_discrepancy <= 1e-3);
}

TEST_CASE("min_area_rect never beats itself but beats the AABB") {
  rng::Stream s(5);
  for (int i = 0; i < 100; ++i) {
    const auto pts = oracles::detail::random_cloud(s);
    const double mbr = geom::min_area_rect(pts).area();
    Rect aabb{{1e300, 1e300}, {-1e300, -1e300}};
    for (const Vec2 p : pts) {
      aabb.min.x = std::min(aabb.min.x, p.x);
      aabb.min.y = std::min(aabb.min.y, p.y);
      aabb.max.x = std::max(aabb.max.x, p.x);
      aabb.max.y = std::max(aabb.max.y, p.y);
    }
    CHECK(mbr <= aabb.area() + 1e-9);
  }
}

TEST_CASE("min_area_rect degenerate inputs") {
  const std::vector<Vec2> one{{3.0, 4.0}};
  const geom::OrientedRect r1 = geom::min_area_rect(one);
  CHECK(r1.area() == 0.0);
  CHECK(r1.center.x == Catch::Approx(3.0));

  const std::vector<Vec2> seg{{0.0, 0.0}, {2.0, 2.0}, {1.0, 1.0}};
  const geom::OrientedRect r2 = geom::min_area_rect(seg);
  CHECK(r2.area() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("polygon_contains_point boundary convention") {
  const Polygon sq = square(2.0);
  CHECK(geom::polygon_contains_point(sq, {1.0, 1.0}));
  CHECK_FALSE(geom::polygon_contains_point(sq, {5.0, 5.0}));
  CHECK(geom::polygon_contains_point(sq, {1.0, 0.0}));  // edge midpoint counts
  CHECK(geom::polygon_contains_point(sq, {0.0, 0.0}));  // corner counts
}

TEST_CASE("polygon_contains_point agrees with winding oracle") {
  const auto rep = oracles::oracle_winding(20000, 777);
  CHECK(rep.max_discrepancy == 0.0);
}

TEST_CASE("polygon_contains_polygon basics") {
  const Polygon outer = square(10.0);
  CHECK(geom::polygon_contains_polygon(outer, outer));
  const Polygon inside = square(2.0, {4.0, 4.0});
  CHECK(geom::polygon_contains_polygon(outer, inside));
  CHECK_FALSE(geom::polygon_contains_polygon(inside, outer));
  const Polygon straddling = square(4.0, {8.0, 2.0});
  CHECK_FALSE(geom::polygon_contains_polygon(outer, straddling));
}

TEST_CASE("polygon_contains_polygon implies area ordering") {
  rng::Stream s(12);
  for (int i = 0; i < 200; ++i) {
    const Polygon a = oracles::detail::random_convex(s);
    const Polygon b = oracles::detail::random_convex(s);
    if (geom::polygon_contains_polygon(a, b)) {
      CHECK(geom::polygon_area(b) <= geom::polygon_area(a) + 1e-9);
    }
  }
}

TEST_CASE("triangulation partitions concave polygons") {
  rng::Stream s(81);
  for (int i = 0; i < 100; ++i) {
    const Polygon p = oracles::detail::random_star(s);
    const auto tris = geom::triangulate(p);
    double total = 0.0;
    for (const Polygon& t : tris) total += geom::polygon_area(t);
    CHECK(total == Catch::Approx(geom::polygon_area(p)).epsilon(1e-9));
  }
}

TEST_CASE("offset_polygon grows and shrinks a square") {
  const Polygon sq = square(10.0);
  const Polygon grown = geom::offset_polygon(sq, 1.0);
  CHECK(geom::polygon_area(grown) == Catch::Approx(144.0));
  const Polygon shrunk = geom::offset_polygon(sq, -1.0);
  CHECK(geom::polygon_area(shrunk) == Catch::Approx(64.0));
}

TEST_CASE("normalize_angle canonical range") {
  CHECK(geom::normalize_angle(geom::kPi) == Catch::Approx(-geom::kPi));
  CHECK(geom::normalize_angle(3.0 * geom::kPi) == Catch::Approx(-geom::kPi));
  CHECK(geom::normalize_angle(-geom::kPi) == Catch::Approx(-geom::kPi));
  CHECK(geom::normalize_angle(0.25) == Catch::Approx(0.25));
  for (double a = -10.0; a < 10.0; a += 0.37) {
    const double n = geom::normalize_angle(a);
    CHECK(n >= -geom::kPi);
    CHECK(n < geom::kPi);
  }
}

TEST_CASE("polygon_min_distance") {
  const Polygon a = square(2.0);
  const Polygon b = square(2.0, {5.0, 0.0});
  CHECK(geom::polygon_min_distance(a, b) == Catch::Approx(3.0));
  const Polygon overlapping = square(2.0, {1.0, 1.0});
  CHECK(geom::polygon_min_distance(a, overlapping) == 0.0);
  const Polygon touching = square(2.0, {2.0, 0.0});
  CHECK(geom::polygon_min_distance(a, touching) == Catch::Approx(0.0).margin(1e-12));
}
