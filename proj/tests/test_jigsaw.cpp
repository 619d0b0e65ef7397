#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <set>

#include "jigsawbench/geometry.hpp"
#include "jigsawbench/jigsaw.hpp"

using namespace jigsawbench;
using geom::Polygon;
using geom::Pose2;
using geom::Vec2;

namespace {

bool same_vertices_bitwise(const Polygon& a, const Polygon& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.vertices.data(), b.vertices.data(), a.size() * sizeof(Vec2)) == 0;
}

bool fails_with(Errc code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const BenchError& e) {
    return e.code() == code;
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace

TEST_CASE("parse_code accepts the reference code") {
  const jigsaw::JigsawCode code = jigsaw::parse_code("000101");
  CHECK(code.shape_family() == 0);
  CHECK(code.size_scale() == 0);
  CHECK(code.thickness_class() == 0);
  CHECK(code.texture_theme() == 1);  // sheep
  CHECK_FALSE(code.has_base_plate());
  CHECK(code.fragment_count_class() == 1);
  CHECK(jigsaw::format_code(code) == "000101");
}

TEST_CASE("parse_code rejects malformed input") {
  CHECK(fails_with(Errc::bad_length, [] { jigsaw::parse_code("00010"); }));
  CHECK(fails_with(Errc::bad_length, [] { jigsaw::parse_code("0001011"); }));
  CHECK(fails_with(Errc::bad_digit, [] { jigsaw::parse_code("0001A1"); }));
  CHECK(fails_with(Errc::unsupported_value, [] { jigsaw::parse_code("100101"); }));
  CHECK(fails_with(Errc::unsupported_value, [] { jigsaw::parse_code("000100"); }));
  CHECK(fails_with(Errc::unsupported_value, [] { jigsaw::parse_code("000121"); }));
}

TEST_CASE("format_code round trip") {
  for (const std::string text : {"000101", "010111", "091101", "055911"}) {
    CHECK(jigsaw::format_code(jigsaw::parse_code(text)) == text);
  }
}

TEST_CASE("fragment areas sum to the cavity area at zero clearance") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000101", 0.0);
  REQUIRE(set.fragments.size() == 4);
  double sum = 0.0;
  for (const jigsaw::PieceSpec& f : set.fragments) {
    sum += geom::polygon_area(f.shape);
  }
  CHECK(sum == Catch::Approx(120.0 * 178.0).epsilon(1e-9));
  CHECK(set.standard_area_mm2 == Catch::Approx(21360.0));
  CHECK_FALSE(set.base.has_value());
}

TEST_CASE("fragments are simple and decompose into convex parts") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000111", 0.6);
  for (const jigsaw::PieceSpec& f : set.fragments) {
    CHECK(geom::is_simple(f.shape));
    const auto tris = geom::triangulate(f.shape);
    double total = 0.0;
    for (const Polygon& t : tris) total += geom::polygon_area(t);
    CHECK(total == Catch::Approx(geom::polygon_area(f.shape)).epsilon(1e-9));
  }
}

TEST_CASE("generation is deterministic down to the bits") {
  const jigsaw::JigsawSet a = jigsaw::generate_set("030511", 0.6);
  const jigsaw::JigsawSet b = jigsaw::generate_set("030511", 0.6);
  REQUIRE(a.fragments.size() == b.fragments.size());
  for (std::size_t i = 0; i < a.fragments.size(); ++i) {
    CHECK(same_vertices_bitwise(a.fragments[i].shape, b.fragments[i].shape));
  }
  CHECK(same_vertices_bitwise(a.base->shape, b.base->shape));
}

TEST_CASE("clearance monotonically shrinks fragments") {
  double prev_area = 1e18;
  for (const double clearance : {0.0, 0.2, 0.6, 1.0, 2.0}) {
    const jigsaw::JigsawSet set = jigsaw::generate_set("000101", clearance);
    const double area = geom::polygon_area(set.fragments[0].shape);
    CHECK(area < prev_area);
    prev_area = area;
  }
}

TEST_CASE("excessive clearance degenerates fragments") {
  CHECK(fails_with(Errc::clearance_too_large, [] { jigsaw::generate_set("000101", 200.0); }));
  CHECK_THROWS_AS(jigsaw::generate_set("000101", -0.1), std::invalid_argument);
}

TEST_CASE("assembled fragments tile the cavity at zero clearance") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000111", 0.0);
  const auto poses = jigsaw::assembled_poses(set, Pose2{});
  std::vector<Polygon> placed;
  double total = 0.0;
  for (const jigsaw::PieceSpec& f : set.fragments) {
    const Polygon fp = geom::transform(f.shape, poses.at(f.id));
    total += geom::polygon_area(fp);
    for (const Polygon& other : placed) {
      CHECK(geom::polygon_intersection_area(fp, other) < 1e-6);
    }
    // Each fragment must lie inside the cavity.
    CHECK(geom::polygon_intersection_area(fp, set.cavity) ==
          Catch::Approx(geom::polygon_area(fp)).epsilon(1e-9));
    placed.push_back(fp);
  }
  CHECK(total == Catch::Approx(geom::polygon_area(set.cavity)).epsilon(1e-6));
}

TEST_CASE("assembled_poses composes with the plate pose") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000111", 0.0);
  const auto canonical = jigsaw::assembled_poses(set, Pose2{});
  const Pose2 plate = Pose2::make(100.0, 50.0, geom::kPi / 2);
  const auto rotated = jigsaw::assembled_poses(set, plate);
  for (const auto& [id, pose] : canonical) {
    const Vec2 expected = plate.apply({pose.x, pose.y});
    CHECK(rotated.at(id).x == Catch::Approx(expected.x));
    CHECK(rotated.at(id).y == Catch::Approx(expected.y));
    CHECK(rotated.at(id).theta == Catch::Approx(geom::normalize_angle(pose.theta + plate.theta)));
  }
}

TEST_CASE("assembled_poses requires a base plate") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000101", 0.0);
  CHECK(fails_with(Errc::no_base_plate, [&] { jigsaw::assembled_poses(set, Pose2{}); }));
}

TEST_CASE("every fragment fits its cell at 0.6 mm clearance") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000111", 0.6);
  const Pose2 plate = Pose2::make(250.0, 300.0, 0.35);
  const auto poses = jigsaw::assembled_poses(set, plate);
  for (const jigsaw::PieceSpec& f : set.fragments) {
    CHECK(jigsaw::fragment_fits_cell(set, f.id, poses.at(f.id), plate));
  }
}

TEST_CASE("fit check tolerates offsets up to the clearance budget") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000111", 0.6);
  const Pose2 plate{};
  const auto poses = jigsaw::assembled_poses(set, plate);
  const Pose2 exact = poses.at(1);
  CHECK(jigsaw::fragment_fits_cell(set, 1, Pose2{exact.x + 0.2, exact.y, exact.theta}, plate));
  CHECK_FALSE(jigsaw::fragment_fits_cell(set, 1, Pose2{exact.x + 1.0, exact.y, exact.theta}, plate));
}

TEST_CASE("maximum assembled gap equals the clearance") {
  const double clearance = 0.6;
  const jigsaw::JigsawSet set = jigsaw::generate_set("000111", clearance);
  const auto poses = jigsaw::assembled_poses(set, Pose2{});
  // Facing straight edges of adjacent eroded fragments sit exactly one
  // clearance apart.
  const Polygon f1 = geom::transform(set.fragments[0].shape, poses.at(1));
  const Polygon f2 = geom::transform(set.fragments[1].shape, poses.at(2));
  const double gap = geom::polygon_min_distance(f1, f2);
  CHECK(gap == Catch::Approx(clearance).margin(1e-6));
}

TEST_CASE("size scale stretches the set linearly") {
  const jigsaw::JigsawSet small = jigsaw::generate_set("000101", 0.0);
  const jigsaw::JigsawSet large = jigsaw::generate_set("040101", 0.0);  // x2.0
  CHECK(large.standard_area_mm2 == Catch::Approx(small.standard_area_mm2 * 4.0));
  CHECK(geom::polygon_area(large.fragments[0].shape) ==
        Catch::Approx(geom::polygon_area(small.fragments[0].shape) * 4.0));
}

TEST_CASE("textures follow the theme digit") {
  const jigsaw::JigsawSet sheep = jigsaw::generate_set("000111", 0.0);
  CHECK(sheep.fragments[0].texture == "sheep_1");
  CHECK(sheep.base->texture == "sheep_base");
  const jigsaw::JigsawSet cow = jigsaw::generate_set("000211", 0.0);
  CHECK(cow.fragments[2].texture == "cow_3");
  std::set<std::string> labels;
  for (const auto& f : cow.fragments) labels.insert(f.texture);
  CHECK(labels.size() == 4);  // recognition needs distinct fragment labels
}

TEST_CASE("thickness follows the thickness digit") {
  CHECK(jigsaw::generate_set("000101", 0.0).fragments[0].thickness_mm == Catch::Approx(5.0));
  CHECK(jigsaw::generate_set("003101", 0.0).fragments[0].thickness_mm == Catch::Approx(8.0));
}

TEST_CASE("eroded fragment stays inside its cell, offset fragment escapes") {
  const jigsaw::JigsawSet set = jigsaw::generate_set("000111", 0.6);
  const Polygon& cell = set.cells.at(1);
  const Polygon& frag = set.fragments[0].shape;
  CHECK(geom::polygon_contains_polygon(cell, frag));
  const Polygon offset = geom::transform(frag, Pose2{1.0, 0.0, 0.0});
  CHECK_FALSE(geom::polygon_contains_polygon(cell, offset));
}
