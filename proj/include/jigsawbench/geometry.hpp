#pragma once

// Exact-enough 2D polygon arithmetic for piece footprints, detections and
// placement checks. All coordinates are millimeters, double precision.
// Polygons are simple and counter-clockwise; general (concave) inputs are
// handled by triangulation, convex-vs-convex by a single clipping pass.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace jigsawbench::geom {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Distance (mm) below which a point counts as lying on a boundary.
inline constexpr double kBoundaryEps = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{0.0, 0.0};
}

// Wraps an angle into [-pi, pi).
inline double normalize_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

// Planar rigid transform: rotate by theta, then translate by (x, y).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  static Pose2 make(double x, double y, double theta) { return {x, y, normalize_angle(theta)}; }

  Vec2 apply(Vec2 p) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * p.x - s * p.y + x, s * p.x + c * p.y + y};
  }

  // this ∘ other: apply `other` first, then this.
  Pose2 compose(const Pose2& other) const {
    const Vec2 t = apply({other.x, other.y});
    return {t.x, t.y, normalize_angle(theta + other.theta)};
  }
};

struct Polygon {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }
  Vec2 operator[](std::size_t i) const { return vertices[i]; }
};

// Axis-aligned rectangle, min corner to max corner.
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return std::max(0.0, max.x - min.x); }
  double height() const { return std::max(0.0, max.y - min.y); }
  double area() const { return width() * height(); }
  Vec2 center() const { return {(min.x + max.x) * 0.5, (min.y + max.y) * 0.5}; }
  bool contains(Vec2 p) const {
    return p.x >= min.x - kBoundaryEps && p.x <= max.x + kBoundaryEps &&
           p.y >= min.y - kBoundaryEps && p.y <= max.y + kBoundaryEps;
  }
};

struct OrientedRect {
  Vec2 center;
  Vec2 half_extents;
  double theta = 0.0;

  double area() const { return 4.0 * half_extents.x * half_extents.y; }

  std::array<Vec2, 4> corners() const {
    const Vec2 u{std::cos(theta), std::sin(theta)};
    const Vec2 v = perp(u);
    const Vec2 ex = u * half_extents.x;
    const Vec2 ey = v * half_extents.y;
    return {center - ex - ey, center + ex - ey, center + ex + ey, center - ex + ey};
  }
};

// Signed shoelace area; positive for CCW input, 0 for degenerate input.
inline double polygon_area(const Polygon& p) {
  const std::size_t n = p.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p.vertices[i];
    const Vec2 b = p.vertices[(i + 1) % n];
    s += cross(a, b);
  }
  return 0.5 * s;
}

inline double polygon_perimeter(const Polygon& p) {
  const std::size_t n = p.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += norm(p.vertices[(i + 1) % n] - p.vertices[i]);
  }
  return s;
}

// Area centroid. Falls back to the vertex mean for degenerate polygons.
inline Vec2 polygon_centroid(const Polygon& p) {
  const std::size_t n = p.size();
  double a2 = 0.0;
  Vec2 c{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 u = p.vertices[i];
    const Vec2 v = p.vertices[(i + 1) % n];
    const double w = cross(u, v);
    a2 += w;
    c.x += (u.x + v.x) * w;
    c.y += (u.y + v.y) * w;
  }
  if (std::abs(a2) < 1e-12) {
    Vec2 m{0.0, 0.0};
    for (const Vec2 v : p.vertices) m = m + v;
    return n ? m * (1.0 / static_cast<double>(n)) : m;
  }
  return c * (1.0 / (3.0 * a2));
}

inline Polygon transform(const Polygon& p, const Pose2& pose) {
  Polygon out;
  out.vertices.reserve(p.size());
  for (const Vec2 v : p.vertices) out.vertices.push_back(pose.apply(v));
  return out;
}

inline Rect bounding_rect(const Polygon& p) {
  Rect r{{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()},
         {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()}};
  for (const Vec2 v : p.vertices) {
    r.min.x = std::min(r.min.x, v.x);
    r.min.y = std::min(r.min.y, v.y);
    r.max.x = std::max(r.max.x, v.x);
    r.max.y = std::max(r.max.y, v.y);
  }
  return r;
}

// Intersection over union of two axis-aligned rectangles. Returns 0 when the
// union has zero area.
inline double rect_iou(const Rect& a, const Rect& b) {
  const double ix = std::max(0.0, std::min(a.max.x, b.max.x) - std::max(a.min.x, b.min.x));
  const double iy = std::max(0.0, std::min(a.max.y, b.max.y) - std::max(a.min.y, b.min.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

inline double distance_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

inline double distance_to_boundary(const Polygon& p, Vec2 pt) {
  double d = std::numeric_limits<double>::max();
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    d = std::min(d, distance_point_segment(pt, p.vertices[i], p.vertices[(i + 1) % n]));
  }
  return d;
}

// Boundary-inclusive point containment via crossing parity. The boundary
// convention keeps containment closed under exact placement.
inline bool polygon_contains_point(const Polygon& p, Vec2 pt) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (distance_point_segment(pt, p.vertices[i], p.vertices[(i + 1) % n]) <= kBoundaryEps) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = p.vertices[j];
    const Vec2 b = p.vertices[i];
    if ((a.y > pt.y) != (b.y > pt.y)) {
      const double x_at = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x_at > pt.x) inside = !inside;
    }
  }
  return inside;
}

inline bool is_convex(const Polygon& p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p.vertices[i];
    const Vec2 b = p.vertices[(i + 1) % n];
    const Vec2 c = p.vertices[(i + 2) % n];
    if (cross(b - a, c - b) < -1e-9) return false;
  }
  return true;
}

// Andrew monotone chain. Output is CCW with no collinear vertices; degenerate
// inputs yield hulls with fewer than 3 vertices.
inline Polygon convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return Polygon{pts};

  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) {
    // All input points collinear; keep the two extremes.
    return Polygon{{hull.front(), hull.back()}};
  }
  return Polygon{hull};
}

// Minimum-area oriented bounding rectangle. One rectangle edge is collinear
// with a hull edge, so scanning hull edges is exhaustive.
inline OrientedRect min_area_rect(std::span<const Vec2> points) {
  const Polygon hull = convex_hull(points);
  if (hull.size() == 0) return OrientedRect{};
  if (hull.size() == 1) return OrientedRect{hull[0], {0.0, 0.0}, 0.0};
  if (hull.size() == 2) {
    const Vec2 a = hull[0];
    const Vec2 b = hull[1];
    const Vec2 d = b - a;
    return OrientedRect{(a + b) * 0.5, {norm(d) * 0.5, 0.0}, normalize_angle(std::atan2(d.y, d.x))};
  }

  OrientedRect best;
  double best_area = std::numeric_limits<double>::max();
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 u = normalized(hull[(i + 1) % n] - hull[i]);
    if (u == Vec2{0.0, 0.0}) continue;
    const Vec2 v = perp(u);
    double su_min = std::numeric_limits<double>::max(), su_max = std::numeric_limits<double>::lowest();
    double sv_min = su_min, sv_max = su_max;
    for (const Vec2 p : hull.vertices) {
      const double su = dot(p, u);
      const double sv = dot(p, v);
      su_min = std::min(su_min, su);
      su_max = std::max(su_max, su);
      sv_min = std::min(sv_min, sv);
      sv_max = std::max(sv_max, sv);
    }
    const double area = (su_max - su_min) * (sv_max - sv_min);
    if (area < best_area) {
      best_area = area;
      const Vec2 c = u * ((su_min + su_max) * 0.5) + v * ((sv_min + sv_max) * 0.5);
      best = OrientedRect{c, {(su_max - su_min) * 0.5, (sv_max - sv_min) * 0.5},
                          normalize_angle(std::atan2(u.y, u.x))};
    }
  }
  return best;
}

inline std::optional<Vec2> line_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2) {
  const double den = cross(d1, d2);
  if (std::abs(den) < 1e-12) return std::nullopt;
  const double t = cross(p2 - p1, d2) / den;
  return p1 + d1 * t;
}

// Sutherland-Hodgman; `clip` must be convex CCW. Vertices on a clip edge are
// treated as inside.
inline Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  if (subject.size() < 3 || clip.size() < 3) return Polygon{};
  std::vector<Vec2> out = subject.vertices;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2 c1 = clip.vertices[e];
    const Vec2 c2 = clip.vertices[(e + 1) % m];
    const Vec2 dir = c2 - c1;
    const double len = norm(dir);
    if (len <= 0.0) continue;
    std::vector<Vec2> in;
    in.swap(out);
    const std::size_t k = in.size();
    for (std::size_t i = 0; i < k; ++i) {
      const Vec2 prev = in[(i + k - 1) % k];
      const Vec2 cur = in[i];
      // Signed distance to the clip edge, positive inside.
      const double dp = cross(dir, prev - c1) / len;
      const double dc = cross(dir, cur - c1) / len;
      const bool prev_in = dp >= -kBoundaryEps;
      const bool cur_in = dc >= -kBoundaryEps;
      if (cur_in) {
        if (!prev_in) {
          if (auto x = line_intersection(prev, cur - prev, c1, dir)) out.push_back(*x);
        }
        out.push_back(cur);
      } else if (prev_in) {
        if (auto x = line_intersection(prev, cur - prev, c1, dir)) out.push_back(*x);
      }
    }
  }
  return Polygon{out};
}

// Ear-clipping triangulation of a simple CCW polygon. O(n^2); polygons here
// stay small. Collinear vertices are dropped rather than emitted as
// zero-area ears.
inline std::vector<Polygon> triangulate(const Polygon& p) {
  std::vector<Polygon> tris;
  const std::size_t n = p.size();
  if (n < 3) return tris;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;

  auto point_blocks_ear = [&](Vec2 a, Vec2 b, Vec2 c, Vec2 q) {
    const double d1 = cross(b - a, q - a);
    const double d2 = cross(c - b, q - b);
    const double d3 = cross(a - c, q - c);
    return d1 >= -1e-12 && d2 >= -1e-12 && d3 >= -1e-12;
  };

  while (idx.size() > 3) {
    const std::size_t m = idx.size();
    bool clipped = false;
    double min_abs_cross = std::numeric_limits<double>::max();
    std::size_t flattest = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 a = p.vertices[idx[(i + m - 1) % m]];
      const Vec2 b = p.vertices[idx[i]];
      const Vec2 c = p.vertices[idx[(i + 1) % m]];
      const double turn = cross(b - a, c - b);
      if (std::abs(turn) < min_abs_cross) {
        min_abs_cross = std::abs(turn);
        flattest = i;
      }
      if (turn <= 1e-12) continue;  // reflex or collinear corner
      bool ok = true;
      for (std::size_t j = 0; j < m && ok; ++j) {
        if (j == i || j == (i + m - 1) % m || j == (i + 1) % m) continue;
        if (point_blocks_ear(a, b, c, p.vertices[idx[j]])) ok = false;
      }
      if (!ok) continue;
      tris.push_back(Polygon{{a, b, c}});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) {
      // Numerically flat corner; removing it changes the area by ~0.
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(flattest));
    }
  }
  if (idx.size() == 3) {
    const Polygon last{{p.vertices[idx[0]], p.vertices[idx[1]], p.vertices[idx[2]]}};
    if (polygon_area(last) > 0.0) tris.push_back(last);
  }
  return tris;
}

inline std::vector<Polygon> convex_parts(const Polygon& p) {
  if (is_convex(p)) return {p};
  return triangulate(p);
}

// Exact intersection area of two simple polygons: convex pairs use one
// clipping pass, anything else goes through triangulation (triangles
// partition the interior, so pairwise clip areas add up).
inline double polygon_intersection_area(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  const Rect ra = bounding_rect(a);
  const Rect rb = bounding_rect(b);
  if (ra.min.x > rb.max.x || rb.min.x > ra.max.x || ra.min.y > rb.max.y || rb.min.y > ra.max.y) {
    return 0.0;
  }
  if (is_convex(a) && is_convex(b)) {
    return std::max(0.0, polygon_area(clip_convex(a, b)));
  }
  double total = 0.0;
  for (const Polygon& pa : convex_parts(a)) {
    for (const Polygon& pb : convex_parts(b)) {
      total += std::max(0.0, polygon_area(clip_convex(pa, pb)));
    }
  }
  return total;
}

// inner ⊆ outer, decided by comparing intersection area against the inner
// area at 1e-9 relative tolerance.
inline bool polygon_contains_polygon(const Polygon& outer, const Polygon& inner) {
  const double ai = polygon_area(inner);
  if (ai <= 0.0) return false;
  const double inter = polygon_intersection_area(outer, inner);
  return inter >= ai * (1.0 - 1e-9);
}

// Offsets every edge of a simple CCW polygon by `delta` (positive outward,
// negative inward) and rebuilds vertices from adjacent edge-line
// intersections. Valid for |delta| small against local feature size; callers
// validate the result.
inline Polygon offset_polygon(const Polygon& p, double delta) {
  const std::size_t n = p.size();
  Polygon out;
  out.vertices.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a_prev = p.vertices[(i + n - 1) % n];
    const Vec2 a = p.vertices[i];
    const Vec2 a_next = p.vertices[(i + 1) % n];
    const Vec2 d1 = a - a_prev;
    const Vec2 d2 = a_next - a;
    // CCW interior lies left of each edge; outward normal points right.
    const Vec2 n1 = normalized(Vec2{d1.y, -d1.x});
    const Vec2 n2 = normalized(Vec2{d2.y, -d2.x});
    const auto x = line_intersection(a_prev + n1 * delta, d1, a + n2 * delta, d2);
    out.vertices[i] = x ? *x : a + n1 * delta;
  }
  return out;
}

// Minimum distance between two simple polygons; 0 when they overlap or touch.
inline double polygon_min_distance(const Polygon& a, const Polygon& b) {
  if (a.size() == 0 || b.size() == 0) return std::numeric_limits<double>::max();
  if (a.size() >= 3 && polygon_contains_point(a, b.vertices[0])) return 0.0;
  if (b.size() >= 3 && polygon_contains_point(b, a.vertices[0])) return 0.0;
  double d = std::numeric_limits<double>::max();
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const Vec2 a0 = a.vertices[i];
      const Vec2 a1 = a.vertices[(i + 1) % na];
      const Vec2 b0 = b.vertices[j];
      const Vec2 b1 = b.vertices[(j + 1) % nb];
      const double d1 = distance_point_segment(a0, b0, b1);
      const double d2 = distance_point_segment(b0, a0, a1);
      d = std::min({d, d1, d2});
      // Crossing edges have distance 0 but no vertex need lie inside.
      const double c1 = cross(a1 - a0, b0 - a0);
      const double c2 = cross(a1 - a0, b1 - a0);
      const double c3 = cross(b1 - b0, a0 - b0);
      const double c4 = cross(b1 - b0, a1 - b0);
      if (((c1 > 0) != (c2 > 0)) && ((c3 > 0) != (c4 > 0))) return 0.0;
    }
  }
  return d;
}

inline bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// O(n^2) simplicity check for non-adjacent edge crossings.
inline bool is_simple(const Polygon& p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_properly_intersect(p.vertices[i], p.vertices[(i + 1) % n], p.vertices[j],
                                      p.vertices[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace jigsawbench::geom
