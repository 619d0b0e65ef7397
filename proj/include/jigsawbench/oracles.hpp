#pragma once

// Brute-force verification oracles run against the geometry implementation
// on randomized instances. Each oracle takes an independent computation
// path: Monte-Carlo area sampling for rectangle IoU and polygon clipping,
// an exhaustive angle sweep for the minimum bounding rectangle, and a
// winding-number test for point containment.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jigsawbench/errors.hpp"
#include "jigsawbench/geometry.hpp"
#include "jigsawbench/rng.hpp"

namespace jigsawbench::oracles {

using geom::Polygon;
using geom::Rect;
using geom::Vec2;

// Angle-sum winding test, boundary-inclusive with the same epsilon as the
// implementation under test.
inline bool winding_contains(const Polygon& p, Vec2 pt) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (geom::distance_point_segment(pt, p.vertices[i], p.vertices[(i + 1) % n]) <=
        geom::kBoundaryEps) {
      return true;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = p.vertices[i] - pt;
    const Vec2 b = p.vertices[(i + 1) % n] - pt;
    total += std::atan2(geom::cross(a, b), geom::dot(a, b));
  }
  return std::abs(total) > geom::kPi;  // ~2*pi inside, ~0 outside
}

struct OracleReport {
  std::string kind;
  int cases = 0;
  double max_discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

namespace detail {

inline Rect random_rect(rng::Stream& s) {
  const double x = s.uniform(0.0, 100.0);
  const double y = s.uniform(0.0, 100.0);
  const double w = s.uniform(5.0, 60.0);
  const double h = s.uniform(5.0, 60.0);
  return Rect{{x, y}, {x + w, y + h}};
}

inline Polygon random_convex(rng::Stream& s, int max_points = 12) {
  while (true) {
    std::vector<Vec2> pts;
    const int n = 3 + static_cast<int>(s.uniform_index(static_cast<std::uint64_t>(max_points - 2)));
    for (int i = 0; i < n; ++i) {
      pts.push_back({s.uniform(0.0, 100.0), s.uniform(0.0, 100.0)});
    }
    Polygon hull = geom::convex_hull(pts);
    if (hull.size() >= 3 && geom::polygon_area(hull) > 1.0) return hull;
  }
}

// Star polygon: angularly monotone vertices around a center, so the result
// is simple but generally concave.
inline Polygon random_star(rng::Stream& s) {
  const Vec2 c{s.uniform(30.0, 70.0), s.uniform(30.0, 70.0)};
  const int n = 5 + static_cast<int>(s.uniform_index(8));
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double jitter = s.uniform(-0.3, 0.3) * (2.0 * geom::kPi / n);
    const double a = 2.0 * geom::kPi * i / n + jitter;
    const double r = s.uniform(8.0, 45.0);
    p.vertices.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return p;
}

inline std::vector<Vec2> random_cloud(rng::Stream& s) {
  const int n = 3 + static_cast<int>(s.uniform_index(38));
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back({s.uniform(0.0, 200.0), s.uniform(0.0, 200.0)});
  }
  return pts;
}

}  // namespace detail

// rect_iou vs Monte-Carlo area sampling over the union's bounding box.
inline OracleReport oracle_iou_mc(int pairs, std::uint64_t seed, int mc_samples = 1000000) {
  OracleReport rep;
  rep.kind = "iou_mc";
  rep.cases = pairs;
  rep.tolerance = 0.01;
  rng::Stream s(seed);
  for (int k = 0; k < pairs; ++k) {
    const Rect a = detail::random_rect(s);
    const Rect b = detail::random_rect(s);
    const double exact = geom::rect_iou(a, b);

    const Rect bb{{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y)},
                  {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y)}};
    const std::uint64_t sample_seed = rng::substream(seed, "iou_mc", static_cast<std::uint64_t>(k));
    std::int64_t in_union = 0;
    std::int64_t in_both = 0;
    for (int i = 0; i < mc_samples; ++i) {
      const double x =
          bb.min.x + bb.width() * rng::keyed_uniform(sample_seed, static_cast<std::uint64_t>(i) * 2);
      const double y = bb.min.y +
                       bb.height() * rng::keyed_uniform(sample_seed, static_cast<std::uint64_t>(i) * 2 + 1);
      const bool ia = x >= a.min.x && x <= a.max.x && y >= a.min.y && y <= a.max.y;
      const bool ib = x >= b.min.x && x <= b.max.x && y >= b.min.y && y <= b.max.y;
      in_union += (ia || ib) ? 1 : 0;
      in_both += (ia && ib) ? 1 : 0;
    }
    const double estimate =
        in_union > 0 ? static_cast<double>(in_both) / static_cast<double>(in_union) : 0.0;
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(exact - estimate));
  }
  rep.pass = rep.max_discrepancy < rep.tolerance;
  return rep;
}

// min_area_rect vs brute-force sweep: axis-aligned bounding-box area after
// rotating the cloud through a 0.1-degree grid plus the hull edge angles
// (the theoretical optimum set), all computed independently of the
// implementation's projection math.
inline OracleReport oracle_mbr_sweep(int clouds, std::uint64_t seed, double step_deg = 0.1) {
  OracleReport rep;
  rep.kind = "mbr_sweep";
  rep.cases = clouds;
  rep.tolerance = 1e-3;
  rng::Stream s(seed);
  for (int k = 0; k < clouds; ++k) {
    const std::vector<Vec2> pts = detail::random_cloud(s);
    const double impl_area = geom::min_area_rect(pts).area();

    std::vector<double> angles;
    for (double deg = 0.0; deg < 90.0; deg += step_deg) {
      angles.push_back(deg * geom::kPi / 180.0);
    }
    const Polygon hull = geom::convex_hull(pts);
    const std::size_t n = hull.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 d = hull.vertices[(i + 1) % n] - hull.vertices[i];
      angles.push_back(std::atan2(d.y, d.x));
    }

    double sweep_min = std::numeric_limits<double>::max();
    for (const double a : angles) {
      const double c = std::cos(-a);
      const double sn = std::sin(-a);
      double min_x = std::numeric_limits<double>::max(), max_x = std::numeric_limits<double>::lowest();
      double min_y = min_x, max_y = max_x;
      for (const Vec2 p : pts) {
        const double rx = c * p.x - sn * p.y;
        const double ry = sn * p.x + c * p.y;
        min_x = std::min(min_x, rx);
        max_x = std::max(max_x, rx);
        min_y = std::min(min_y, ry);
        max_y = std::max(max_y, ry);
      }
      sweep_min = std::min(sweep_min, (max_x - min_x) * (max_y - min_y));
    }
    const double rel = sweep_min > 1e-12 ? std::abs(impl_area - sweep_min) / sweep_min
                                         : std::abs(impl_area - sweep_min);
    rep.max_discrepancy = std::max(rep.max_discrepancy, rel);
  }
  rep.pass = rep.max_discrepancy <= rep.tolerance;
  return rep;
}

// polygon_contains_point vs the winding-number oracle; discrepancy is the
// number of disagreements (must be zero).
inline OracleReport oracle_winding(int cases, std::uint64_t seed) {
  OracleReport rep;
  rep.kind = "winding";
  rep.cases = cases;
  rep.tolerance = 0.0;
  rng::Stream s(seed);
  int mismatches = 0;
  for (int k = 0; k < cases; ++k) {
    const Polygon p = (k % 2 == 0) ? detail::random_convex(s) : detail::random_star(s);
    const Rect bb = geom::bounding_rect(p);
    const Vec2 pt{s.uniform(bb.min.x - 10.0, bb.max.x + 10.0),
                  s.uniform(bb.min.y - 10.0, bb.max.y + 10.0)};
    if (geom::polygon_contains_point(p, pt) != winding_contains(p, pt)) ++mismatches;
  }
  rep.max_discrepancy = static_cast<double>(mismatches);
  rep.pass = mismatches == 0;
  return rep;
}

// polygon_intersection_area vs Monte-Carlo sampling, normalized by the
// sampled bounding-box area.
inline OracleReport oracle_clip_mc(int pairs, std::uint64_t seed, int mc_samples = 1000000) {
  OracleReport rep;
  rep.kind = "clip_mc";
  rep.cases = pairs;
  rep.tolerance = 0.01;
  rng::Stream s(seed);
  for (int k = 0; k < pairs; ++k) {
    const Polygon a = detail::random_convex(s);
    const Polygon b = detail::random_convex(s);
    const double exact = geom::polygon_intersection_area(a, b);

    const Rect ra = geom::bounding_rect(a);
    const Rect rb = geom::bounding_rect(b);
    const Rect bb{{std::min(ra.min.x, rb.min.x), std::min(ra.min.y, rb.min.y)},
                  {std::max(ra.max.x, rb.max.x), std::max(ra.max.y, rb.max.y)}};
    const std::uint64_t sample_seed = rng::substream(seed, "clip_mc", static_cast<std::uint64_t>(k));
    std::int64_t hits = 0;
    for (int i = 0; i < mc_samples; ++i) {
      const Vec2 pt{
          bb.min.x + bb.width() * rng::keyed_uniform(sample_seed, static_cast<std::uint64_t>(i) * 2),
          bb.min.y + bb.height() * rng::keyed_uniform(sample_seed, static_cast<std::uint64_t>(i) * 2 + 1)};
      if (winding_contains(a, pt) && winding_contains(b, pt)) ++hits;
    }
    const double estimate = bb.area() * static_cast<double>(hits) / static_cast<double>(mc_samples);
    rep.max_discrepancy =
        std::max(rep.max_discrepancy, std::abs(exact - estimate) / std::max(bb.area(), 1e-12));
  }
  rep.pass = rep.max_discrepancy < rep.tolerance;
  return rep;
}

inline OracleReport run_oracle(const std::string& kind, int samples, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleReport rep;
  if (kind == "iou_mc") {
    rep = oracle_iou_mc(samples > 0 ? samples : 1000, seed);
  } else if (kind == "mbr_sweep") {
    rep = oracle_mbr_sweep(samples > 0 ? samples : 200, seed);
  } else if (kind == "winding") {
    rep = oracle_winding(samples > 0 ? samples : 100000, seed);
  } else if (kind == "clip_mc") {
    rep = oracle_clip_mc(samples > 0 ? samples : 200, seed);
  } else {
    fail(Errc::config_error, "unknown oracle kind: " + kind +
                                 " (expected iou_mc, mbr_sweep, winding or clip_mc)");
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace jigsawbench::oracles
