#pragma once

// Deterministic jigsaw-set generation from a 6-digit code: one base plate
// with a rectangular cavity and four interlocking fragments produced by a
// horizontal and a vertical cut. Every tab/slot pair is a trapezoid; the
// four trapezoids share one area but no two share a shape, so no fragment
// fits another fragment's cell.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jigsawbench/errors.hpp"
#include "jigsawbench/geometry.hpp"

namespace jigsawbench::jigsaw {

using geom::Polygon;
using geom::Pose2;
using geom::Vec2;

// d0 shape family, d1 size scale, d2 thickness class, d3 texture theme,
// d4 base-plate presence, d5 fragment-count class.
struct JigsawCode {
  std::array<int, 6> digits{};

  int shape_family() const { return digits[0]; }
  int size_scale() const { return digits[1]; }
  int thickness_class() const { return digits[2]; }
  int texture_theme() const { return digits[3]; }
  bool has_base_plate() const { return digits[4] != 0; }
  int fragment_count_class() const { return digits[5]; }

  double scale_factor() const { return 1.0 + 0.25 * size_scale(); }
  double thickness_mm() const { return 5.0 + static_cast<double>(thickness_class()); }
};

inline const char* texture_theme_name(int theme) {
  static constexpr const char* kNames[10] = {"plain", "sheep", "cow",    "pig",    "duck",
                                             "horse", "goat",  "rabbit", "hen",    "dog"};
  return (theme >= 0 && theme < 10) ? kNames[theme] : "plain";
}

inline JigsawCode parse_code(const std::string& text) {
  if (text.size() != 6) {
    fail(Errc::bad_length, "jigsaw code must be exactly 6 digits, got \"" + text + "\"");
  }
  JigsawCode code;
  for (int i = 0; i < 6; ++i) {
    const char c = text[static_cast<std::size_t>(i)];
    if (c < '0' || c > '9') {
      fail(Errc::bad_digit, "jigsaw code digit " + std::to_string(i) + " is not decimal");
    }
    code.digits[static_cast<std::size_t>(i)] = c - '0';
  }
  if (code.shape_family() != 0) {
    fail(Errc::unsupported_value, "shape family digit d0 supports only 0");
  }
  if (code.digits[4] > 1) {
    fail(Errc::unsupported_value, "base-plate digit d4 supports only 0 or 1");
  }
  if (code.fragment_count_class() != 1) {
    fail(Errc::unsupported_value, "fragment-count digit d5 supports only 1 (four fragments)");
  }
  return code;
}

inline std::string format_code(const JigsawCode& code) {
  std::string s(6, '0');
  for (int i = 0; i < 6; ++i) {
    s[static_cast<std::size_t>(i)] = static_cast<char>('0' + code.digits[static_cast<std::size_t>(i)]);
  }
  return s;
}

enum class PieceKind { base_plate, fragment };

// Shape vertices are in the piece's canonical frame: fragments are centered
// on their cavity cell, the base plate on its outer rectangle.
struct PieceSpec {
  int id = 0;
  PieceKind kind = PieceKind::fragment;
  Polygon shape;
  std::string texture;
  double thickness_mm = 5.0;
};

struct JigsawSet {
  JigsawCode code;
  double clearance_mm = 0.0;

  std::optional<PieceSpec> base;
  std::vector<PieceSpec> fragments;  // ids 1..4

  // Plate-local geometry (canonical plate frame, origin at plate center).
  Polygon cavity;
  std::map<int, Vec2> cell_offsets;      // fragment id -> cell center, plate frame
  std::map<int, Polygon> cells;          // nominal (clearance 0) fragment shapes, cell frame
  std::map<int, Polygon> cells_dilated;  // cells grown by clearance/2, cell frame

  double standard_area_mm2 = 0.0;

  const PieceSpec* piece(int id) const {
    if (base && base->id == id) return &*base;
    for (const PieceSpec& f : fragments) {
      if (f.id == id) return &f;
    }
    return nullptr;
  }

  std::vector<std::string> texture_labels() const {
    std::vector<std::string> out;
    if (base) out.push_back(base->texture);
    for (const PieceSpec& f : fragments) out.push_back(f.texture);
    return out;
  }
};

namespace detail {

// One trapezoidal tab: `base` on the cut line, `top` at depth `depth` into
// the receiving cell. All four share area (base+top)/2*depth = 160 mm^2 at
// unit scale, but the shapes differ so the fragment set has no congruent
// pair under rotation.
struct Tab {
  double center;  // position of the trapezoid midline along the cut
  double base;
  double top;
  double depth;
};

// Appends the trapezoid detour for an edge walked from `from` toward `to`
// (exclusive of the endpoints). `outward` +1 bulges left of travel? No:
// signed `bulge` gives the offset direction perpendicular to travel applied
// to the detour (positive = +x for vertical travel up, +y for horizontal
// travel right, following the axis the tab crosses).
inline void walk_edge_with_feature(std::vector<Vec2>& out, Vec2 from, Vec2 to, const Tab& tab,
                                   double bulge) {
  const bool vertical = std::abs(to.x - from.x) < 1e-12;
  const double dir = vertical ? (to.y > from.y ? 1.0 : -1.0) : (to.x > from.x ? 1.0 : -1.0);
  const double b2 = tab.base * 0.5;
  const double t2 = tab.top * 0.5;
  if (vertical) {
    const double x = from.x;
    out.push_back({x, tab.center - dir * b2});
    out.push_back({x + bulge * tab.depth, tab.center - dir * t2});
    out.push_back({x + bulge * tab.depth, tab.center + dir * t2});
    out.push_back({x, tab.center + dir * b2});
  } else {
    const double y = from.y;
    out.push_back({tab.center - dir * b2, y});
    out.push_back({tab.center - dir * t2, y + bulge * tab.depth});
    out.push_back({tab.center + dir * t2, y + bulge * tab.depth});
    out.push_back({tab.center + dir * b2, y});
  }
}

inline Polygon scaled(const Polygon& p, double s) {
  Polygon out;
  out.vertices.reserve(p.size());
  for (const Vec2 v : p.vertices) out.vertices.push_back({v.x * s, v.y * s});
  return out;
}

inline Polygon translated(const Polygon& p, Vec2 t) {
  Polygon out;
  out.vertices.reserve(p.size());
  for (const Vec2 v : p.vertices) out.vertices.push_back(v + t);
  return out;
}

// Uniform inward erosion with validation; throws ClearanceTooLarge when the
// inset degenerates the shape.
inline Polygon erode_checked(const Polygon& p, double inset, int fragment_id) {
  if (inset == 0.0) return p;
  const Polygon out = geom::offset_polygon(p, -inset);
  const double a0 = geom::polygon_area(p);
  const double a1 = geom::polygon_area(out);
  const bool ok = a1 > 0.0 && a1 < a0 && geom::is_simple(out) &&
                  geom::polygon_intersection_area(p, out) >= a1 * (1.0 - 1e-9);
  if (!ok) {
    fail(Errc::clearance_too_large,
         "clearance erosion degenerates fragment " + std::to_string(fragment_id));
  }
  return out;
}

}  // namespace detail

// Builds the full set for a code. Reference dimensions at unit scale:
// plate 140x198 mm, cavity 120x178 mm, four 60x89 mm cells with 8 mm deep
// trapezoid tabs. The fragment erosion is clearance/2 per piece, so two
// facing fragments assemble with a total gap equal to `clearance_mm`.
inline JigsawSet generate_set(const JigsawCode& code, double clearance_mm) {
  if (clearance_mm < 0.0) {
    throw std::invalid_argument("clearance must be non-negative");
  }
  const double s = code.scale_factor();

  // Cavity-local layout (x in [0,120], y in [0,178]) before scaling.
  const double kCavW = 120.0, kCavH = 178.0;
  const double kCutX = 60.0, kCutY = 89.0;
  const detail::Tab tab_v_bottom{44.5, 24.0, 16.0, 8.0};  // BL -> BR
  const detail::Tab tab_v_top{133.5, 26.0, 14.0, 8.0};    // TR -> TL
  const detail::Tab tab_h_left{30.0, 22.0, 18.0, 8.0};    // TL -> BL
  const detail::Tab tab_h_right{90.0, 28.0, 12.0, 8.0};   // BR -> TR

  using detail::walk_edge_with_feature;

  // Fragment 1: bottom-left cell, tab through the vertical cut, slot from
  // the horizontal cut.
  Polygon bl;
  bl.vertices = {{0.0, 0.0}, {kCutX, 0.0}};
  walk_edge_with_feature(bl.vertices, {kCutX, 0.0}, {kCutX, kCutY}, tab_v_bottom, +1.0);
  bl.vertices.push_back({kCutX, kCutY});
  walk_edge_with_feature(bl.vertices, {kCutX, kCutY}, {0.0, kCutY}, tab_h_left, -1.0);
  bl.vertices.push_back({0.0, kCutY});

  // Fragment 2: bottom-right cell, slot on the vertical cut, tab upward.
  Polygon br;
  br.vertices = {{kCutX, 0.0}, {kCavW, 0.0}, {kCavW, kCutY}};
  walk_edge_with_feature(br.vertices, {kCavW, kCutY}, {kCutX, kCutY}, tab_h_right, +1.0);
  br.vertices.push_back({kCutX, kCutY});
  walk_edge_with_feature(br.vertices, {kCutX, kCutY}, {kCutX, 0.0}, tab_v_bottom, +1.0);

  // Fragment 3: top-left cell, tab downward, slot on the vertical cut.
  Polygon tl;
  tl.vertices = {{0.0, kCutY}};
  walk_edge_with_feature(tl.vertices, {0.0, kCutY}, {kCutX, kCutY}, tab_h_left, -1.0);
  tl.vertices.push_back({kCutX, kCutY});
  walk_edge_with_feature(tl.vertices, {kCutX, kCutY}, {kCutX, kCavH}, tab_v_top, -1.0);
  tl.vertices.push_back({kCutX, kCavH});
  tl.vertices.push_back({0.0, kCavH});

  // Fragment 4: top-right cell, slot from below, tab through the vertical cut.
  Polygon tr;
  tr.vertices = {{kCutX, kCutY}};
  walk_edge_with_feature(tr.vertices, {kCutX, kCutY}, {kCavW, kCutY}, tab_h_right, +1.0);
  tr.vertices.push_back({kCavW, kCutY});
  tr.vertices.push_back({kCavW, kCavH});
  tr.vertices.push_back({kCutX, kCavH});
  walk_edge_with_feature(tr.vertices, {kCutX, kCavH}, {kCutX, kCutY}, tab_v_top, -1.0);

  const std::array<Polygon, 4> raw{bl, br, tl, tr};
  const Vec2 cavity_center{kCavW * 0.5, kCavH * 0.5};

  JigsawSet set;
  set.code = code;
  set.clearance_mm = clearance_mm;

  const std::string theme = texture_theme_name(code.texture_theme());
  const double thickness = code.thickness_mm();

  for (int i = 0; i < 4; ++i) {
    const int id = i + 1;
    // Canonical frame centered on the nominal shape's bounding box, so a
    // fragment placed at a pose extends symmetrically around it. Scaled to
    // the code's size class.
    const Vec2 c = geom::bounding_rect(raw[static_cast<std::size_t>(i)]).center();
    Polygon nominal = detail::scaled(detail::translated(raw[static_cast<std::size_t>(i)], {-c.x, -c.y}), s);

    PieceSpec piece;
    piece.id = id;
    piece.kind = PieceKind::fragment;
    piece.texture = theme + "_" + std::to_string(id);
    piece.thickness_mm = thickness;
    piece.shape = detail::erode_checked(nominal, clearance_mm * 0.5, id);
    set.fragments.push_back(std::move(piece));

    set.cells[id] = nominal;
    set.cells_dilated[id] =
        clearance_mm > 0.0 ? geom::offset_polygon(nominal, clearance_mm * 0.5) : nominal;
    const Vec2 off = (c - cavity_center) * s;
    set.cell_offsets[id] = off;
  }

  const double cav_w = kCavW * s;
  const double cav_h = kCavH * s;
  set.cavity.vertices = {{-cav_w / 2, -cav_h / 2},
                         {cav_w / 2, -cav_h / 2},
                         {cav_w / 2, cav_h / 2},
                         {-cav_w / 2, cav_h / 2}};
  set.standard_area_mm2 = cav_w * cav_h;

  if (code.has_base_plate()) {
    const double w = 140.0 * s;
    const double h = 198.0 * s;
    PieceSpec plate;
    plate.id = 0;
    plate.kind = PieceKind::base_plate;
    plate.texture = theme + "_base";
    plate.thickness_mm = thickness;
    plate.shape.vertices = {{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}};
    set.base = std::move(plate);
  }
  return set;
}

inline JigsawSet generate_set(const std::string& code_text, double clearance_mm) {
  return generate_set(parse_code(code_text), clearance_mm);
}

// Pose placing each fragment exactly in its cavity cell under `plate_pose`.
inline std::map<int, Pose2> assembled_poses(const JigsawSet& set, const Pose2& plate_pose) {
  if (!set.base) {
    fail(Errc::no_base_plate, "assembled_poses requires a set with a base plate");
  }
  std::map<int, Pose2> out;
  for (const auto& [id, off] : set.cell_offsets) {
    const Vec2 p = plate_pose.apply(off);
    out[id] = Pose2{p.x, p.y, plate_pose.theta};
  }
  return out;
}

// True when the fragment footprint at `fragment_pose` sits inside its cavity
// cell dilated by clearance/2, with the plate at `plate_pose`. This is the
// geometric core of the assembly fit check and is usable without a base
// plate piece (the cells exist for every generated set).
inline bool fragment_fits_cell(const JigsawSet& set, int fragment_id, const Pose2& fragment_pose,
                               const Pose2& plate_pose) {
  const PieceSpec* frag = set.piece(fragment_id);
  const auto cell_it = set.cells_dilated.find(fragment_id);
  const auto off_it = set.cell_offsets.find(fragment_id);
  if (!frag || frag->kind != PieceKind::fragment || cell_it == set.cells_dilated.end() ||
      off_it == set.cell_offsets.end()) {
    return false;
  }
  const Vec2 off = off_it->second;
  const Pose2 cell_pose = plate_pose.compose(Pose2{off.x, off.y, 0.0});
  const Polygon cell_world = geom::transform(cell_it->second, cell_pose);
  const Polygon frag_world = geom::transform(frag->shape, fragment_pose);
  return geom::polygon_contains_polygon(cell_world, frag_world);
}

}  // namespace jigsawbench::jigsaw
