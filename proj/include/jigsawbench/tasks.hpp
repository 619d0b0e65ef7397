#pragma once

// The three benchmark tasks (pick-and-place, tiling, assembly in simple and
// dexterous variants): scene setup, the action loop driving the perception
// pipeline against the simulated world, and the full metric suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jigsawbench/errors.hpp"
#include "jigsawbench/geometry.hpp"
#include "jigsawbench/jigsaw.hpp"
#include "jigsawbench/pipeline.hpp"
#include "jigsawbench/rng.hpp"
#include "jigsawbench/sensing.hpp"
#include "jigsawbench/world.hpp"

namespace jigsawbench::tasks {

using geom::Polygon;
using geom::Pose2;
using geom::Rect;
using geom::Vec2;

enum class TaskKind { pick_place, tiling, assembly_simple, assembly_dexterous };

inline const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::pick_place: return "pick_place";
    case TaskKind::tiling: return "tiling";
    case TaskKind::assembly_simple: return "assembly_simple";
    case TaskKind::assembly_dexterous: return "assembly_dexterous";
  }
  return "unknown";
}

inline std::optional<TaskKind> parse_task_kind(const std::string& name) {
  if (name == "pick_place") return TaskKind::pick_place;
  if (name == "tiling") return TaskKind::tiling;
  if (name == "assembly_simple") return TaskKind::assembly_simple;
  if (name == "assembly_dexterous") return TaskKind::assembly_dexterous;
  return std::nullopt;
}

inline bool uses_recognition(TaskKind k) { return k != TaskKind::pick_place; }
inline bool is_assembly(TaskKind k) {
  return k == TaskKind::assembly_simple || k == TaskKind::assembly_dexterous;
}

struct TaskSpec {
  TaskKind kind = TaskKind::pick_place;
  std::string code = "000101";
  double clearance_mm = 0.6;
  int max_actions = 8;
};

// Goal fixtures are metric references, not scene objects: the sheet and the
// target squares are printed paper, invisible to the piece sensor.
struct TaskGoal {
  std::optional<Rect> sheet;
  std::vector<Rect> squares;
  std::optional<Pose2> anchor;  // tiling target anchor
};

struct TaskSetup {
  world::WorldState world;
  TaskGoal goal;
};

inline Rect default_table() { return Rect{{0.0, 0.0}, {600.0, 600.0}}; }

namespace detail {

inline Polygon rect_polygon(const Rect& r) {
  return Polygon{{{r.min.x, r.min.y}, {r.max.x, r.min.y}, {r.max.x, r.max.y}, {r.min.x, r.max.y}}};
}

}  // namespace detail

// Builds the initial scene for a task. pick_place: A4-sized sheet (1.5x the
// assembled footprint) centered on the table with four target squares in a
// 2x2 grid; tiling: an empty anchor region at the table center; assembly:
// the base plate laid down square at a random spot plus scattered fragments.
inline TaskSetup setup_task(const TaskSpec& spec, std::uint64_t seed,
                            const Rect& table = default_table()) {
  if (spec.max_actions < 4) {
    fail(Errc::config_error, "max_actions must be at least 4");
  }
  const jigsaw::JigsawCode code = jigsaw::parse_code(spec.code);
  const jigsaw::JigsawSet set = jigsaw::generate_set(code, spec.clearance_mm);
  const double s = code.scale_factor();
  const Vec2 c = table.center();

  TaskSetup setup;
  world::SpawnConstraints constraints;

  switch (spec.kind) {
    case TaskKind::pick_place: {
      const double sheet_w = 210.0 * s;
      const double sheet_h = 297.0 * s;
      setup.goal.sheet = Rect{{c.x - sheet_w / 2, c.y - sheet_h / 2},
                              {c.x + sheet_w / 2, c.y + sheet_h / 2}};
      const double half_sq = 50.0 * s;
      const double off_x = 52.5 * s;
      const double off_y = 76.0 * s;
      for (const double dy : {-off_y, off_y}) {
        for (const double dx : {-off_x, off_x}) {
          setup.goal.squares.push_back(Rect{{c.x + dx - half_sq, c.y + dy - half_sq},
                                            {c.x + dx + half_sq, c.y + dy + half_sq}});
        }
      }
      constraints.include_base = false;
      constraints.keep_out.push_back(detail::rect_polygon(*setup.goal.sheet));
      break;
    }
    case TaskKind::tiling: {
      setup.goal.anchor = Pose2{c.x, c.y, 0.0};
      Rect region = geom::bounding_rect(set.cavity);
      region.min = region.min + c + Vec2{-20.0, -20.0};
      region.max = region.max + c + Vec2{20.0, 20.0};
      constraints.include_base = false;
      constraints.keep_out.push_back(detail::rect_polygon(region));
      break;
    }
    case TaskKind::assembly_simple:
    case TaskKind::assembly_dexterous: {
      if (!set.base) {
        fail(Errc::no_base_plate,
             "assembly task needs a base plate (code digit d4 must be 1)");
      }
      constraints.include_base = true;
      break;
    }
  }
  setup.world = world::spawn_random(set, table, seed, constraints);
  return setup;
}

// --- metric operations -----------------------------------------------------

// Mean best-match IoU over ground-truth boxes: detections and truths pair up
// greedily by descending IoU, one to one; unmatched truths contribute 0.
inline double compute_iou_metric(const std::vector<pipeline::DetectionBox>& detections,
                                 const std::vector<Rect>& truth) {
  if (truth.empty()) return 0.0;
  struct Pair {
    double iou;
    std::size_t det;
    std::size_t tru;
  };
  std::vector<Pair> pairs;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    for (std::size_t t = 0; t < truth.size(); ++t) {
      const double v = geom::rect_iou(detections[d].rect, truth[t]);
      if (v > 0.0) pairs.push_back(Pair{v, d, t});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.det != b.det) return a.det < b.det;
    return a.tru < b.tru;
  });
  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> tru_used(truth.size(), false);
  double total = 0.0;
  for (const Pair& p : pairs) {
    if (det_used[p.det] || tru_used[p.tru]) continue;
    det_used[p.det] = true;
    tru_used[p.tru] = true;
    total += p.iou;
  }
  return total / static_cast<double>(truth.size());
}

inline constexpr double kApMatchIou = 0.5;

// Classification accuracy over the fragment ground truths: M correct labels
// out of the fragment count, with boxes matched to truths at IoU >= 0.5.
inline double compute_ap(const std::vector<pipeline::DetectionBox>& detections,
                         const std::vector<pipeline::ClassPrediction>& predictions,
                         const std::vector<std::pair<Rect, std::string>>& fragment_truth) {
  if (fragment_truth.empty()) return 0.0;
  std::map<int, const pipeline::ClassPrediction*> by_box;
  for (const pipeline::ClassPrediction& p : predictions) by_box[p.box_index] = &p;

  struct Pair {
    double iou;
    std::size_t det;
    std::size_t tru;
  };
  std::vector<Pair> pairs;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    for (std::size_t t = 0; t < fragment_truth.size(); ++t) {
      const double v = geom::rect_iou(detections[d].rect, fragment_truth[t].first);
      if (v >= kApMatchIou) pairs.push_back(Pair{v, d, t});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.det != b.det) return a.det < b.det;
    return a.tru < b.tru;
  });
  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> tru_used(fragment_truth.size(), false);
  int correct = 0;
  for (const Pair& p : pairs) {
    if (det_used[p.det] || tru_used[p.tru]) continue;
    det_used[p.det] = true;
    tru_used[p.tru] = true;
    const auto it = by_box.find(static_cast<int>(p.det));
    if (it != by_box.end() && it->second->label == fragment_truth[p.tru].second) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(fragment_truth.size());
}

inline double compute_success_rate(const std::vector<bool>& outcomes) {
  if (outcomes.empty()) {
    fail(Errc::no_attempts, "success rate needs at least one pick attempt");
  }
  std::size_t ok = 0;
  for (const bool b : outcomes) ok += b ? 1u : 0u;
  return static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

// Fraction of fragments fully contained in a target square, each square
// creditable once.
inline double score_pick_place(const world::WorldState& w, const TaskGoal& goal) {
  std::vector<bool> credited(goal.squares.size(), false);
  int placed = 0;
  int fragments = 0;
  for (const jigsaw::PieceSpec& frag : w.set.fragments) {
    ++fragments;
    const world::SceneObject* obj = w.find(frag.id);
    if (!obj) continue;
    const Polygon fp = geom::transform(frag.shape, obj->pose);
    for (std::size_t si = 0; si < goal.squares.size(); ++si) {
      if (credited[si]) continue;
      if (geom::polygon_contains_polygon(detail::rect_polygon(goal.squares[si]), fp)) {
        credited[si] = true;
        ++placed;
        break;
      }
    }
  }
  return fragments > 0 ? static_cast<double>(placed) / static_cast<double>(fragments) : 0.0;
}

struct TilingScore {
  double area_rate = 0.0;   // standard area / minimum-bounding-rect area, capped at 1
  double completion = 0.0;  // layer-0 covered area inside that rect / standard area
  bool stacking_flag = false;
  double real_area_mm2 = 0.0;
};

inline TilingScore score_tiling(const world::WorldState& w) {
  std::vector<Vec2> points;
  std::vector<const world::SceneObject*> frags;
  for (const jigsaw::PieceSpec& frag : w.set.fragments) {
    const world::SceneObject* obj = w.find(frag.id);
    if (!obj) continue;
    frags.push_back(obj);
    const Polygon fp = geom::transform(frag.shape, obj->pose);
    points.insert(points.end(), fp.vertices.begin(), fp.vertices.end());
  }
  if (frags.empty()) {
    fail(Errc::no_fragments_placed, "tiling score needs fragments on the table");
  }

  TilingScore score;
  const geom::OrientedRect mbr = geom::min_area_rect(points);
  score.real_area_mm2 = mbr.area();
  score.area_rate = score.real_area_mm2 > 0.0
                        ? std::min(1.0, w.set.standard_area_mm2 / score.real_area_mm2)
                        : 0.0;

  const auto corners = mbr.corners();
  const Polygon mbr_poly{{corners[0], corners[1], corners[2], corners[3]}};
  double covered = 0.0;
  for (const world::SceneObject* obj : frags) {
    if (obj->z_layer != 0) {
      score.stacking_flag = true;
      continue;
    }
    const Polygon fp = geom::transform(w.set.piece(obj->piece_id)->shape, obj->pose);
    covered += geom::polygon_intersection_area(fp, mbr_poly);
  }
  score.completion = w.set.standard_area_mm2 > 0.0
                         ? std::min(1.0, covered / w.set.standard_area_mm2)
                         : 0.0;
  return score;
}

// Fraction of fragments seated in their cavity cells.
inline double score_assembly(const world::WorldState& w) {
  if (!w.base_plate()) {
    fail(Errc::no_base_plate, "assembly score requires the base plate in the scene");
  }
  int seated = 0;
  int fragments = 0;
  for (const jigsaw::PieceSpec& frag : w.set.fragments) {
    ++fragments;
    if (w.find(frag.id) && world::assembly_fit_check(w, frag.id)) ++seated;
  }
  return fragments > 0 ? static_cast<double>(seated) / static_cast<double>(fragments) : 0.0;
}

// --- task execution ----------------------------------------------------------

struct FunctionMetrics {
  double mean_iou = 0.0;
  double ap = 1.0;  // vacuously 1 when recognition is not exercised
  bool recognition_used = false;
  double success_rate = 0.0;
  double grasp_time_s = 0.0;  // modeled pick-transfer-place time, mean per attempt
  pipeline::StageTimings timings;  // wall clock, summed over actions
};

struct TaskResult {
  double score = 0.0;
  std::optional<double> area_rate;
  std::optional<double> completion;
  bool stacking_flag = false;
  FunctionMetrics metrics;
  int actions_used = 0;
  int placed_count = 0;  // raw count behind the quantized score (piece-count tasks)
};

struct ActionRecord {
  int action_index = 0;
  int box_index = -1;  // -1: no actionable detection this cycle
  int target_piece_id = -1;
  pipeline::PickPose pick;
  bool pick_attempted = false;
  bool pick_success = false;
  Pose2 place_target;
  std::optional<Pose2> landed;
  int z_layer = 0;
  bool snapped = false;
  double placement_error_mm = 0.0;
  double pick_elapsed_s = 0.0;
  double place_elapsed_s = 0.0;
  double planned_duration_s = 0.0;
  double obs_mean_iou = 0.0;
  double obs_ap = 1.0;
  pipeline::StageTimings timings;  // wall clock for this action
};

struct TrialOutcome {
  TaskResult result;
  std::vector<ActionRecord> actions;
};

namespace detail {

struct ControllerState {
  std::vector<bool> square_done;
  std::set<int> fragments_done;
};

struct ChosenAction {
  int box_index = -1;
  int fragment_id = -1;
  int square_index = -1;
  Pose2 place;
};

inline bool all_done(TaskKind kind, const ControllerState& st, const TaskGoal& goal,
                     const jigsaw::JigsawSet& set) {
  if (kind == TaskKind::pick_place) {
    for (std::size_t i = 0; i < goal.squares.size(); ++i) {
      if (!st.square_done[i]) return false;
    }
    return true;
  }
  return st.fragments_done.size() >= set.fragments.size();
}

inline int fragment_id_by_label(const jigsaw::JigsawSet& set, const std::string& label) {
  for (const jigsaw::PieceSpec& f : set.fragments) {
    if (f.texture == label) return f.id;
  }
  return -1;
}

// Task policy: which detection to act on and where to put it. Everything
// here works from pipeline outputs only; ground truth stays in the metrics.
inline std::optional<ChosenAction> choose_action(TaskKind kind, const pipeline::Perception& perc,
                                                 const TaskGoal& goal,
                                                 const jigsaw::JigsawSet& set,
                                                 const ControllerState& st) {
  switch (kind) {
    case TaskKind::pick_place: {
      int square = -1;
      for (std::size_t i = 0; i < goal.squares.size(); ++i) {
        if (!st.square_done[i]) {
          square = static_cast<int>(i);
          break;
        }
      }
      if (square < 0) return std::nullopt;
      for (std::size_t b = 0; b < perc.boxes.size(); ++b) {
        const Vec2 center = perc.boxes[b].rect.center();
        bool in_done_square = false;
        for (std::size_t i = 0; i < goal.squares.size(); ++i) {
          if (st.square_done[i] && goal.squares[i].contains(center)) {
            in_done_square = true;
            break;
          }
        }
        if (in_done_square) continue;
        ChosenAction act;
        act.box_index = static_cast<int>(b);
        act.square_index = square;
        const Vec2 sc = goal.squares[static_cast<std::size_t>(square)].center();
        act.place = Pose2{sc.x, sc.y, 0.0};
        return act;
      }
      return std::nullopt;
    }
    case TaskKind::tiling: {
      for (const pipeline::ClassPrediction& pred : perc.predictions) {
        const int id = fragment_id_by_label(set, pred.label);
        if (id < 0 || st.fragments_done.count(id)) continue;
        ChosenAction act;
        act.box_index = pred.box_index;
        act.fragment_id = id;
        const Vec2 off = set.cell_offsets.at(id);
        const Vec2 p = goal.anchor->apply(off);
        act.place = Pose2{p.x, p.y, goal.anchor->theta};
        return act;
      }
      return std::nullopt;
    }
    case TaskKind::assembly_simple:
    case TaskKind::assembly_dexterous: {
      if (perc.boxes.empty()) return std::nullopt;
      // The plate is located by the camera: its detection is by far the
      // largest, its center is the plate center, and the board is laid down
      // square by protocol (boxes carry no orientation).
      std::size_t plate_box = 0;
      double best_area = -1.0;
      for (std::size_t b = 0; b < perc.boxes.size(); ++b) {
        const double a = perc.boxes[b].rect.area();
        if (a > best_area) {
          best_area = a;
          plate_box = b;
        }
      }
      const Vec2 pc = perc.boxes[plate_box].rect.center();
      const Pose2 plate_pose{pc.x, pc.y, 0.0};
      for (const pipeline::ClassPrediction& pred : perc.predictions) {
        if (pred.box_index == static_cast<int>(plate_box)) continue;
        const int id = fragment_id_by_label(set, pred.label);
        if (id < 0 || st.fragments_done.count(id)) continue;
        ChosenAction act;
        act.box_index = pred.box_index;
        act.fragment_id = id;
        const Vec2 off = set.cell_offsets.at(id);
        const Vec2 p = plate_pose.apply(off);
        act.place = Pose2{p.x, p.y, plate_pose.theta};
        return act;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Runs one seeded trial of the task: render -> pipeline -> pick -> place per
// action until the task completes or the action budget runs out. All
// randomness derives from `seed` through per-purpose substreams.
inline TrialOutcome run_task(const TaskSpec& spec, const world::HardwareProfile& profile,
                             const pipeline::PipelineConfig& pcfg,
                             const pipeline::StageRegistry& registry, std::uint64_t seed,
                             const Rect& table = default_table()) {
  const bool recognition = uses_recognition(spec.kind);
  registry.validate(pcfg, recognition);

  TaskSetup setup = setup_task(spec, seed, table);
  world::WorldState& w = setup.world;
  const jigsaw::JigsawSet& set = w.set;

  const sensing::Observation background = sensing::render_background(w, profile.camera);
  const Pose2 home = world::home_pose(table);
  const world::PlaceMode mode = spec.kind == TaskKind::assembly_dexterous
                                    ? world::PlaceMode::dexterous
                                    : world::PlaceMode::simple;

  detail::ControllerState st;
  st.square_done.assign(setup.goal.squares.size(), false);

  TrialOutcome out;
  std::vector<double> iou_per_obs;
  std::vector<double> ap_per_obs;
  std::vector<bool> pick_outcomes;
  std::vector<double> grasp_times;

  for (int action = 0; action < spec.max_actions; ++action) {
    if (detail::all_done(spec.kind, st, setup.goal, set)) break;

    const sensing::Observation obs =
        sensing::render(w, profile.camera, rng::substream(seed, "obs", static_cast<std::uint64_t>(action)));
    pipeline::Perception perc = pipeline::run_pipeline(obs, background, registry, pcfg, recognition);

    ActionRecord rec;
    rec.action_index = action;
    rec.timings = perc.timings;

    // Function metrics for this observation, scored against ground truth.
    const sensing::SceneTruth& truth = obs.truth_for_metrics();
    std::vector<Rect> truth_rects;
    std::vector<std::pair<Rect, std::string>> fragment_truth;
    for (const sensing::TruthItem& item : truth.items) {
      truth_rects.push_back(item.rect);
      if (item.kind == jigsaw::PieceKind::fragment) {
        fragment_truth.emplace_back(item.rect, item.label);
      }
    }
    rec.obs_mean_iou = compute_iou_metric(perc.boxes, truth_rects);
    iou_per_obs.push_back(rec.obs_mean_iou);
    if (recognition) {
      rec.obs_ap = compute_ap(perc.boxes, perc.predictions, fragment_truth);
      ap_per_obs.push_back(rec.obs_ap);
    }

    const auto chosen = detail::choose_action(spec.kind, perc, setup.goal, set, st);
    if (chosen) {
      rec.box_index = chosen->box_index;
      rec.target_piece_id = chosen->fragment_id;
      rec.place_target = chosen->place;
      rec.pick = perc.picks[static_cast<std::size_t>(chosen->box_index)];

      {
        pipeline::detail::StopWatch t;
        const pipeline::MotionPlanFn plan_motion = registry.motion_planner(pcfg);
        pipeline::MotionPlan plan = pipeline::detail::run_stage(
            "motion planning", [&] { return plan_motion(rec.pick, chosen->place, home, table, profile); });
        plan.planning_time_s = t.seconds();
        rec.timings.motion_planning_s = plan.planning_time_s;
        rec.planned_duration_s = plan.planned_duration_s;
      }

      rng::Stream pick_stream(rng::substream(seed, "pick", static_cast<std::uint64_t>(action)));
      rng::Stream place_stream(rng::substream(seed, "place", static_cast<std::uint64_t>(action)));

      rec.pick_attempted = true;
      const world::PickOutcome pick =
          world::execute_pick(w, Pose2{rec.pick.x, rec.pick.y, rec.pick.angle}, profile, pick_stream);
      rec.pick_success = pick.success;
      rec.pick_elapsed_s = pick.elapsed_s;
      pick_outcomes.push_back(pick.success);

      double grasp = pick.elapsed_s;
      if (pick.success) {
        const world::PlaceOutcome place =
            world::execute_place(w, chosen->place, mode, profile, place_stream);
        rec.landed = place.landed;
        rec.z_layer = place.z_layer;
        rec.snapped = place.snapped;
        rec.place_elapsed_s = place.elapsed_s;
        rec.placement_error_mm =
            std::hypot(place.landed.x - chosen->place.x, place.landed.y - chosen->place.y);
        grasp += place.elapsed_s;
        if (chosen->square_index >= 0) {
          st.square_done[static_cast<std::size_t>(chosen->square_index)] = true;
        }
        if (chosen->fragment_id >= 0) {
          st.fragments_done.insert(chosen->fragment_id);
        }
      }
      grasp_times.push_back(grasp);
    }

    out.actions.push_back(std::move(rec));
  }

  // Final scoring over the settled world.
  TaskResult& res = out.result;
  res.actions_used = static_cast<int>(out.actions.size());
  switch (spec.kind) {
    case TaskKind::pick_place:
      res.score = score_pick_place(w, setup.goal);
      res.placed_count = static_cast<int>(std::lround(res.score * static_cast<double>(set.fragments.size())));
      break;
    case TaskKind::tiling: {
      const TilingScore ts = score_tiling(w);
      res.score = ts.area_rate;
      res.area_rate = ts.area_rate;
      res.completion = ts.completion;
      res.stacking_flag = ts.stacking_flag;
      break;
    }
    case TaskKind::assembly_simple:
    case TaskKind::assembly_dexterous:
      res.score = score_assembly(w);
      res.placed_count = static_cast<int>(std::lround(res.score * static_cast<double>(set.fragments.size())));
      break;
  }

  FunctionMetrics& m = res.metrics;
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  m.mean_iou = mean(iou_per_obs);
  m.recognition_used = recognition;
  m.ap = recognition ? mean(ap_per_obs) : 1.0;
  m.success_rate = pick_outcomes.empty() ? 0.0 : compute_success_rate(pick_outcomes);
  m.grasp_time_s = mean(grasp_times);
  for (const ActionRecord& rec : out.actions) {
    m.timings.segmentation_s += rec.timings.segmentation_s;
    m.timings.recognition_s += rec.timings.recognition_s;
    m.timings.pick_planning_s += rec.timings.pick_planning_s;
    m.timings.motion_planning_s += rec.timings.motion_planning_s;
  }
  return out;
}

}  // namespace jigsawbench::tasks
