#pragma once

// Simulated table scene: piece placement, suction pick/place with profile
// noise, the dexterous insertion model, and the arm motion-time model.
// A WorldState is confined to one trial; nothing here is shared.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jigsawbench/errors.hpp"
#include "jigsawbench/geometry.hpp"
#include "jigsawbench/jigsaw.hpp"
#include "jigsawbench/rng.hpp"

namespace jigsawbench::world {

using geom::Polygon;
using geom::Pose2;
using geom::Rect;
using geom::Vec2;
using jigsaw::JigsawSet;
using jigsaw::PieceKind;

struct ArmProfile {
  int joint_count = 6;
  double max_joint_speed_rad_s = 2.0944;  // 120 deg/s, the shared benchmark setting
  double reach_mm = 1000.0;
  double repeatability_mm = 0.0;  // 1-sigma positional noise
};

struct CameraProfile {
  int resolution_w = 1280;
  int resolution_h = 720;
  double scale_mm_per_px = 1.0;
  double localization_sigma_mm = 0.0;
  double label_confusion = 0.0;
};

struct GripperProfile {
  std::string type = "suction";
  double capture_margin_mm = 2.0;
  double approach_dwell_s = 0.5;
};

struct HardwareProfile {
  std::string name = "ideal";
  ArmProfile arm;
  CameraProfile camera;
  GripperProfile gripper;
};

inline std::optional<ArmProfile> builtin_arm(const std::string& name) {
  if (name == "ur5") return ArmProfile{6, 2.0944, 850.0, 0.1};
  if (name == "ur10e") return ArmProfile{6, 2.0944, 1300.0, 0.05};
  if (name == "panda") return ArmProfile{7, 2.0944, 855.0, 0.1};
  if (name == "ideal") return ArmProfile{6, 2.0944, 1000.0, 0.0};
  return std::nullopt;
}

inline std::optional<CameraProfile> builtin_camera(const std::string& name) {
  if (name == "d435") return CameraProfile{1280, 720, 1.0, 1.0, 0.0};
  if (name == "d435i") return CameraProfile{1280, 720, 1.0, 1.5, 0.1};
  if (name == "ideal") return CameraProfile{1280, 720, 1.0, 0.0, 0.0};
  return std::nullopt;
}

// "arm+camera" built-in pairs, e.g. "ur10e+d435"; "ideal" means zero noise
// everywhere (and a zero capture margin so boundary picks stay valid).
inline std::optional<HardwareProfile> builtin_profile(const std::string& name) {
  if (name == "ideal") {
    HardwareProfile p;
    p.name = "ideal";
    p.arm = *builtin_arm("ideal");
    p.camera = *builtin_camera("ideal");
    p.gripper = GripperProfile{"suction", 0.0, 0.5};
    return p;
  }
  const auto plus = name.find('+');
  if (plus == std::string::npos) return std::nullopt;
  const auto arm = builtin_arm(name.substr(0, plus));
  const auto cam = builtin_camera(name.substr(plus + 1));
  if (!arm || !cam) return std::nullopt;
  HardwareProfile p;
  p.name = name;
  p.arm = *arm;
  p.camera = *cam;
  return p;
}

struct SceneObject {
  int piece_id = 0;
  Pose2 pose;
  int z_layer = 0;
};

struct HeldPiece {
  int piece_id = 0;
  Vec2 held_offset;   // grasp-point-to-centroid offset, world frame, with noise
  Pose2 picked_from;  // where the grasp happened, for the transfer-time model
};

struct WorldState {
  Rect table{{0.0, 0.0}, {600.0, 600.0}};
  JigsawSet set;
  std::vector<SceneObject> objects;
  std::optional<HeldPiece> held;

  const SceneObject* find(int piece_id) const {
    for (const SceneObject& o : objects) {
      if (o.piece_id == piece_id) return &o;
    }
    return nullptr;
  }

  SceneObject* find(int piece_id) {
    for (SceneObject& o : objects) {
      if (o.piece_id == piece_id) return &o;
    }
    return nullptr;
  }

  const SceneObject* base_plate() const {
    if (!set.base) return nullptr;
    return find(set.base->id);
  }

  std::size_t piece_count() const { return objects.size() + (held ? 1u : 0u); }
};

struct PickOutcome {
  bool success = false;
  Vec2 held_offset;  // valid only on success
  double elapsed_s = 0.0;
};

struct PlaceOutcome {
  bool success = false;
  Pose2 landed;
  int z_layer = 0;
  bool snapped = false;
  double elapsed_s = 0.0;
};

enum class PlaceMode { simple, dexterous };

// Dexterous capture range: exceeds the combined 1-sigma hardware error
// budget so the compliant snap succeeds with high probability.
inline constexpr double kCaptureRangeMm = 2.0;
inline constexpr double kCaptureRangeRad = 5.0 * geom::kPi / 180.0;
// Cost of the fine-manipulation step appended to every dexterous place.
inline constexpr double kDexterousProbeS = 0.35;

inline constexpr double kAccelOverheadS = 0.2;
// Effective tool-path lever arm converting joint speed to Cartesian speed.
// Deliberately profile-independent so that arm comparisons isolate the
// joint-count term instead of encoding reach speculation.
inline constexpr double kLeverArmMm = 400.0;

inline double joint_efficiency(int joint_count) { return joint_count >= 7 ? 1.15 : 1.0; }

inline double cartesian_speed(const HardwareProfile& profile) {
  return profile.arm.max_joint_speed_rad_s * kLeverArmMm * joint_efficiency(profile.arm.joint_count);
}

// Trapezoidal-profile travel time plus a fixed acceleration overhead.
inline double motion_time(const Pose2& from, const Pose2& to, const HardwareProfile& profile) {
  const double d = std::hypot(to.x - from.x, to.y - from.y);
  return d / cartesian_speed(profile) + kAccelOverheadS;
}

// Arm rest pose: offset from the workspace center toward the operator side.
inline Pose2 home_pose(const Rect& table) {
  const Vec2 c = table.center();
  return Pose2{c.x, c.y - 300.0, 0.0};
}

namespace detail {

struct Footprint {
  Polygon outer;
  std::optional<Polygon> hole;  // base plate cavity
};

inline Footprint footprint(const WorldState& w, const SceneObject& obj) {
  const jigsaw::PieceSpec* spec = w.set.piece(obj.piece_id);
  Footprint f;
  f.outer = geom::transform(spec->shape, obj.pose);
  if (spec->kind == PieceKind::base_plate) {
    f.hole = geom::transform(w.set.cavity, obj.pose);
  }
  return f;
}

// Material overlap with holes handled by inclusion-exclusion.
inline double overlap_area(const Footprint& a, const Footprint& b) {
  double area = geom::polygon_intersection_area(a.outer, b.outer);
  if (b.hole) area -= geom::polygon_intersection_area(a.outer, *b.hole);
  if (a.hole) area -= geom::polygon_intersection_area(*a.hole, b.outer);
  if (a.hole && b.hole) area += geom::polygon_intersection_area(*a.hole, *b.hole);
  return std::max(0.0, area);
}

inline bool point_on_material(const Footprint& f, Vec2 p) {
  if (!geom::polygon_contains_point(f.outer, p)) return false;
  if (f.hole && geom::polygon_contains_point(*f.hole, p) &&
      geom::distance_to_boundary(*f.hole, p) > geom::kBoundaryEps) {
    return false;  // strictly inside the cavity: no material there
  }
  return true;
}

inline double distance_to_material_boundary(const Footprint& f, Vec2 p) {
  double d = geom::distance_to_boundary(f.outer, p);
  if (f.hole) d = std::min(d, geom::distance_to_boundary(*f.hole, p));
  return d;
}

inline bool inside_table(const Rect& table, const Polygon& poly) {
  for (const Vec2 v : poly.vertices) {
    if (!table.contains(v)) return false;
  }
  return true;
}

inline Vec2 centroid_world(const WorldState& w, const SceneObject& obj) {
  const jigsaw::PieceSpec* spec = w.set.piece(obj.piece_id);
  return obj.pose.apply(geom::polygon_centroid(spec->shape));
}

}  // namespace detail

struct SpawnConstraints {
  bool include_base = true;        // spawn the plate when the set has one
  double min_separation_mm = 5.0;  // pairwise footprint clearance
  std::vector<Polygon> keep_out;   // regions spawned pieces must avoid
  std::optional<Pose2> fixed_base_pose;
  bool base_axis_aligned = true;  // detections are axis-aligned boxes, so the
                                  // board is laid down square by protocol
  int max_attempts_per_piece = 10000;
};

// Rejection-samples non-overlapping uniform poses inside the table.
// Deterministic for a fixed seed.
inline WorldState spawn_random(const JigsawSet& set, const Rect& table, std::uint64_t seed,
                               const SpawnConstraints& constraints = {}) {
  WorldState w;
  w.table = table;
  w.set = set;

  rng::Stream stream(rng::substream(seed, "spawn"));

  std::vector<const jigsaw::PieceSpec*> order;
  if (set.base && constraints.include_base) order.push_back(&*set.base);
  for (const jigsaw::PieceSpec& f : set.fragments) order.push_back(&f);

  std::vector<detail::Footprint> placed;
  for (const jigsaw::PieceSpec* spec : order) {
    const bool is_base = spec->kind == PieceKind::base_plate;
    bool done = false;
    for (int attempt = 0; attempt < constraints.max_attempts_per_piece && !done; ++attempt) {
      Pose2 pose;
      if (is_base && constraints.fixed_base_pose) {
        pose = *constraints.fixed_base_pose;
        attempt = constraints.max_attempts_per_piece;  // fixed pose gets one shot
      } else {
        pose.x = stream.uniform(table.min.x, table.max.x);
        pose.y = stream.uniform(table.min.y, table.max.y);
        pose.theta = (is_base && constraints.base_axis_aligned)
                         ? 0.0
                         : geom::normalize_angle(stream.uniform(-geom::kPi, geom::kPi));
      }
      const Polygon fp = geom::transform(spec->shape, pose);
      if (!detail::inside_table(table, fp)) continue;
      bool ok = true;
      for (const detail::Footprint& other : placed) {
        if (geom::polygon_min_distance(fp, other.outer) < constraints.min_separation_mm) {
          ok = false;
          break;
        }
      }
      for (const Polygon& ko : constraints.keep_out) {
        if (!ok) break;
        if (geom::polygon_min_distance(fp, ko) < 1.0) ok = false;
      }
      if (!ok) continue;
      w.objects.push_back(SceneObject{spec->id, pose, 0});
      placed.push_back(detail::Footprint{fp, std::nullopt});
      done = true;
    }
    if (!done) {
      fail(Errc::placement_infeasible,
           "could not place piece " + std::to_string(spec->id) + " after " +
               std::to_string(constraints.max_attempts_per_piece) + " attempts");
    }
  }
  return w;
}

// Suction pick at (pick.x, pick.y). Succeeds when the point lies on the
// top-most piece with at least capture_margin of material around it; the
// picked piece leaves the scene.
inline PickOutcome execute_pick(WorldState& w, const Pose2& pick, const HardwareProfile& profile,
                                rng::Stream& stream) {
  if (w.held) {
    fail(Errc::gripper_occupied, "execute_pick with a piece already held");
  }
  PickOutcome out;
  out.elapsed_s = motion_time(home_pose(w.table), pick, profile) + profile.gripper.approach_dwell_s;

  const Vec2 pt{pick.x, pick.y};
  const SceneObject* target = nullptr;
  std::size_t target_index = 0;
  for (std::size_t i = 0; i < w.objects.size(); ++i) {
    const SceneObject& obj = w.objects[i];
    const detail::Footprint fp = detail::footprint(w, obj);
    if (!detail::point_on_material(fp, pt)) continue;
    if (!target || obj.z_layer > target->z_layer ||
        (obj.z_layer == target->z_layer && obj.piece_id < target->piece_id)) {
      target = &obj;
      target_index = i;
    }
  }
  if (!target) {
    return out;  // empty table under the cup
  }
  const detail::Footprint fp = detail::footprint(w, *target);
  if (detail::distance_to_material_boundary(fp, pt) < profile.gripper.capture_margin_mm) {
    return out;  // too close to an edge for the cup to seal
  }

  const Vec2 centroid = detail::centroid_world(w, *target);
  const double rep = profile.arm.repeatability_mm;
  out.success = true;
  out.held_offset = (centroid - pt) + Vec2{stream.gaussian(rep), stream.gaussian(rep)};
  w.held = HeldPiece{target->piece_id, out.held_offset, pick};
  w.objects.erase(w.objects.begin() + static_cast<std::ptrdiff_t>(target_index));
  return out;
}

// Releases the held piece aiming at `target` (a canonical-frame pose for the
// piece). Landing adds the held offset and camera localization noise; in
// dexterous mode a landing within the capture range of the piece's own
// assembled slot snaps to the exact slot pose. A landing overlapping a
// same-layer piece stacks on top of it.
inline PlaceOutcome execute_place(WorldState& w, const Pose2& target, PlaceMode mode,
                                  const HardwareProfile& profile, rng::Stream& stream) {
  if (!w.held) {
    fail(Errc::gripper_empty, "execute_place with no piece held");
  }
  const HeldPiece held = *w.held;
  const jigsaw::PieceSpec* spec = w.set.piece(held.piece_id);

  PlaceOutcome out;
  out.elapsed_s = motion_time(held.picked_from, target, profile);

  const double sigma = profile.camera.localization_sigma_mm;
  Pose2 landing{target.x + held.held_offset.x + stream.gaussian(sigma),
                target.y + held.held_offset.y + stream.gaussian(sigma),
                geom::normalize_angle(target.theta)};

  if (mode == PlaceMode::dexterous) {
    out.elapsed_s += kDexterousProbeS;
    if (const SceneObject* plate = w.base_plate();
        plate != nullptr && spec->kind == PieceKind::fragment) {
      const Pose2 slot = jigsaw::assembled_poses(w.set, plate->pose).at(held.piece_id);
      const double dxy = std::hypot(landing.x - slot.x, landing.y - slot.y);
      const double dth = std::abs(geom::normalize_angle(landing.theta - slot.theta));
      if (dxy <= kCaptureRangeMm && dth <= kCaptureRangeRad) {
        out.elapsed_s += motion_time(landing, slot, profile) - kAccelOverheadS;
        landing = slot;
        out.snapped = true;
      }
    }
  }

  const Polygon fp = geom::transform(spec->shape, landing);
  const detail::Footprint landing_fp{
      fp, spec->kind == PieceKind::base_plate
              ? std::optional<Polygon>(geom::transform(w.set.cavity, landing))
              : std::nullopt};
  int z = 0;
  bool bumped = true;
  while (bumped) {
    bumped = false;
    for (const SceneObject& obj : w.objects) {
      if (obj.z_layer != z) continue;
      if (detail::overlap_area(landing_fp, detail::footprint(w, obj)) > 1e-9) {
        ++z;
        bumped = true;
        break;
      }
    }
  }

  w.objects.push_back(SceneObject{held.piece_id, landing, z});
  w.held.reset();
  out.success = true;
  out.landed = landing;
  out.z_layer = z;
  return out;
}

// True when the fragment sits at layer 0 inside its cavity cell dilated by
// clearance/2, under the plate currently in the scene.
inline bool assembly_fit_check(const WorldState& w, int fragment_id) {
  const SceneObject* plate = w.base_plate();
  if (!plate) {
    fail(Errc::no_base_plate, "assembly_fit_check requires the base plate in the scene");
  }
  const SceneObject* frag = w.find(fragment_id);
  if (!frag || frag->z_layer != 0) return false;
  return jigsaw::fragment_fits_cell(w.set, fragment_id, frag->pose, plate->pose);
}

}  // namespace jigsawbench::world
