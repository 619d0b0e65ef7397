#pragma once

// The four-function perception/planning protocol as pluggable stage
// contracts plus deterministic baselines: background-diff segmentation,
// majority-label recognition, foreground-centroid pick planning and a
// straight-line motion planner. Oracle stages that read the ground-truth
// layer validate the harness independently of the baselines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "jigsawbench/errors.hpp"
#include "jigsawbench/geometry.hpp"
#include "jigsawbench/sensing.hpp"
#include "jigsawbench/world.hpp"

namespace jigsawbench::pipeline {

using geom::Pose2;
using geom::Rect;
using geom::Vec2;
using sensing::Observation;

struct DetectionBox {
  Rect rect;  // table frame, mm
  double confidence = 1.0;
};

struct ClassPrediction {
  int box_index = 0;
  std::string label;
  double confidence = 0.0;
};

struct PickPose {
  double x = 0.0;
  double y = 0.0;
  double angle = 0.0;
};

struct MotionPlan {
  std::vector<Pose2> waypoints;
  double planned_duration_s = 0.0;
  double planning_time_s = 0.0;  // measured wall clock, filled by the runner
};

struct StageTimings {
  double segmentation_s = 0.0;
  double recognition_s = 0.0;
  double pick_planning_s = 0.0;
  double motion_planning_s = 0.0;
};

using SegmentFn =
    std::function<std::vector<DetectionBox>(const Observation&, const Observation& background)>;
using RecognizeFn = std::function<std::vector<ClassPrediction>(const Observation&,
                                                               const std::vector<DetectionBox>&)>;
using PickPlanFn = std::function<PickPose(const Observation&, const DetectionBox&)>;
using MotionPlanFn = std::function<MotionPlan(const PickPose&, const Pose2& place,
                                              const Pose2& home, const Rect& table,
                                              const world::HardwareProfile&)>;

struct PipelineConfig {
  std::string segmenter = "background_diff";
  std::string recognizer = "majority_label";
  std::string pick_planner = "foreground_centroid";
  std::string motion_planner = "straight_line";
  int min_component_cells = 100;
};

namespace baseline {

// Background diff + 4-connected component labeling + per-component AABB.
// Components smaller than `min_cells` are discarded; boxes come out ordered
// by min corner, row-major.
inline std::vector<DetectionBox> background_diff(const Observation& obs,
                                                 const Observation& background, int min_cells) {
  if (background.width() != obs.width() || background.height() != obs.height()) {
    fail(Errc::background_missing, "background capture does not match observation dimensions");
  }
  const int w = obs.width();
  const int h = obs.height();
  std::vector<int> comp(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  auto differs = [&](int x, int y) { return obs.label_at(x, y) != background.label_at(x, y); };

  struct Component {
    int min_x, min_y, max_x, max_y;
    int cells = 0;
  };
  std::vector<Component> comps;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t at = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                             static_cast<std::size_t>(x);
      if (!differs(x, y) || comp[at] >= 0) continue;
      const int id = static_cast<int>(comps.size());
      comps.push_back(Component{x, y, x, y, 0});
      std::queue<std::pair<int, int>> frontier;
      frontier.emplace(x, y);
      comp[at] = id;
      while (!frontier.empty()) {
        const auto [cx, cy] = frontier.front();
        frontier.pop();
        Component& c = comps[static_cast<std::size_t>(id)];
        c.cells += 1;
        c.min_x = std::min(c.min_x, cx);
        c.min_y = std::min(c.min_y, cy);
        c.max_x = std::max(c.max_x, cx);
        c.max_y = std::max(c.max_y, cy);
        const int dx[4] = {0, 1, 0, -1};
        const int dy[4] = {-1, 0, 1, 0};
        for (int k = 0; k < 4; ++k) {
          const int nx = cx + dx[k];
          const int ny = cy + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t nat = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) +
                                  static_cast<std::size_t>(nx);
          if (comp[nat] >= 0 || !differs(nx, ny)) continue;
          comp[nat] = id;
          frontier.emplace(nx, ny);
        }
      }
    }
  }

  std::vector<Component> kept;
  for (const Component& c : comps) {
    if (c.cells >= min_cells) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const Component& a, const Component& b) {
    return a.min_y != b.min_y ? a.min_y < b.min_y : a.min_x < b.min_x;
  });

  std::vector<DetectionBox> boxes;
  const Vec2 o = obs.origin();
  const double s = obs.scale();
  for (const Component& c : kept) {
    DetectionBox box;
    box.rect = Rect{{o.x + c.min_x * s, o.y + c.min_y * s},
                    {o.x + (c.max_x + 1) * s, o.y + (c.max_y + 1) * s}};
    box.confidence = 1.0;
    boxes.push_back(box);
  }
  return boxes;
}

struct BoxCells {
  std::vector<std::pair<int, int>> foreground;  // grid indices with a piece label
  std::map<std::int32_t, int> per_piece;        // piece id -> cell count
};

inline BoxCells collect_box_cells(const Observation& obs, const DetectionBox& box) {
  BoxCells out;
  const auto [ix0, iy0] = obs.cell_of(box.rect.min + Vec2{obs.scale() * 0.5, obs.scale() * 0.5});
  const auto [ix1, iy1] = obs.cell_of(box.rect.max - Vec2{obs.scale() * 0.5, obs.scale() * 0.5});
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const std::int32_t v = obs.label_at(ix, iy);
      if (v == Observation::kBackground) continue;
      out.foreground.emplace_back(ix, iy);
      out.per_piece[v] += 1;
    }
  }
  return out;
}

// Majority piece label among the box's foreground cells; ties break toward
// the lower piece id.
inline std::vector<ClassPrediction> majority_label(const Observation& obs,
                                                   const std::vector<DetectionBox>& boxes) {
  std::vector<ClassPrediction> out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const BoxCells cells = collect_box_cells(obs, boxes[i]);
    ClassPrediction pred;
    pred.box_index = static_cast<int>(i);
    if (!cells.foreground.empty()) {
      std::int32_t best_id = -1;
      int best_count = -1;
      for (const auto& [id, count] : cells.per_piece) {
        if (count > best_count) {  // map order makes ties favor lower ids
          best_count = count;
          best_id = id;
        }
      }
      pred.label = obs.apparent_label(best_id);
      pred.confidence = static_cast<double>(best_count) /
                        static_cast<double>(cells.foreground.size());
    }
    out.push_back(std::move(pred));
  }
  return out;
}

// Centroid of the box's foreground cells; falls back to the nearest
// foreground cell when the centroid lands outside the region (L-shaped
// merges). Suction is rotation-insensitive, so the angle stays 0.
inline PickPose foreground_centroid(const Observation& obs, const DetectionBox& box) {
  const BoxCells cells = collect_box_cells(obs, box);
  if (cells.foreground.empty()) {
    fail(Errc::empty_box, "detection box contains no foreground cells");
  }
  Vec2 c{0.0, 0.0};
  for (const auto& [ix, iy] : cells.foreground) {
    c = c + obs.cell_center(ix, iy);
  }
  c = c * (1.0 / static_cast<double>(cells.foreground.size()));

  const auto [cx, cy] = obs.cell_of(c);
  if (obs.label_at(cx, cy) == Observation::kBackground) {
    double best = std::numeric_limits<double>::max();
    Vec2 nearest = c;
    for (const auto& [ix, iy] : cells.foreground) {
      const Vec2 p = obs.cell_center(ix, iy);
      const double d = geom::dot(p - c, p - c);
      if (d < best) {
        best = d;
        nearest = p;
      }
    }
    c = nearest;
  }
  return PickPose{c.x, c.y, 0.0};
}

// home -> pre-pick -> pick -> pre-place -> place; the pre-poses coincide
// with their targets in the plane, so they contribute overhead terms only.
inline MotionPlan straight_line(const PickPose& pick, const Pose2& place, const Pose2& home,
                                const Rect& table, const world::HardwareProfile& profile) {
  if (!table.contains({pick.x, pick.y}) || !table.contains({place.x, place.y})) {
    fail(Errc::out_of_bounds, "motion plan endpoint outside the workspace");
  }
  MotionPlan plan;
  const Pose2 pick_pose{pick.x, pick.y, pick.angle};
  plan.waypoints = {home, pick_pose, pick_pose, place, place};
  for (std::size_t i = 0; i + 1 < plan.waypoints.size(); ++i) {
    plan.planned_duration_s +=
        world::motion_time(plan.waypoints[i], plan.waypoints[i + 1], profile);
  }
  return plan;
}

}  // namespace baseline

namespace oracle {

// Truth-reading stages. They validate harness and metrics end to end: with
// zero actuation noise they must drive every task to a perfect score.
inline std::vector<DetectionBox> segment(const Observation& obs, const Observation&) {
  const sensing::SceneTruth& truth = obs.truth_for_metrics();
  std::vector<DetectionBox> boxes;
  for (const sensing::TruthItem& item : truth.items) {
    boxes.push_back(DetectionBox{item.rect, 1.0});
  }
  std::sort(boxes.begin(), boxes.end(), [](const DetectionBox& a, const DetectionBox& b) {
    return a.rect.min.y != b.rect.min.y ? a.rect.min.y < b.rect.min.y
                                        : a.rect.min.x < b.rect.min.x;
  });
  return boxes;
}

inline const sensing::TruthItem* best_truth_match(const sensing::SceneTruth& truth,
                                                  const Rect& rect) {
  const sensing::TruthItem* best = nullptr;
  double best_iou = -1.0;
  for (const sensing::TruthItem& item : truth.items) {
    const double v = geom::rect_iou(item.rect, rect);
    if (v > best_iou) {
      best_iou = v;
      best = &item;
    }
  }
  return best;
}

inline std::vector<ClassPrediction> recognize(const Observation& obs,
                                              const std::vector<DetectionBox>& boxes) {
  const sensing::SceneTruth& truth = obs.truth_for_metrics();
  std::vector<ClassPrediction> out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    ClassPrediction pred;
    pred.box_index = static_cast<int>(i);
    if (const sensing::TruthItem* item = best_truth_match(truth, boxes[i].rect)) {
      pred.label = item->label;
      pred.confidence = 1.0;
    }
    out.push_back(std::move(pred));
  }
  return out;
}

inline PickPose pick(const Observation& obs, const DetectionBox& box) {
  const sensing::SceneTruth& truth = obs.truth_for_metrics();
  const sensing::TruthItem* item = best_truth_match(truth, box.rect);
  if (!item) {
    fail(Errc::empty_box, "no truth item matches the detection box");
  }
  return PickPose{item->centroid.x, item->centroid.y, 0.0};
}

}  // namespace oracle

class StageRegistry {
 public:
  std::map<std::string, std::function<SegmentFn(const PipelineConfig&)>> segmenters;
  std::map<std::string, RecognizeFn> recognizers;
  std::map<std::string, PickPlanFn> pick_planners;
  std::map<std::string, MotionPlanFn> motion_planners;

  SegmentFn segmenter(const PipelineConfig& cfg) const {
    const auto it = segmenters.find(cfg.segmenter);
    if (it == segmenters.end()) fail(Errc::config_error, "unknown segmenter: " + cfg.segmenter);
    return it->second(cfg);
  }
  RecognizeFn recognizer(const PipelineConfig& cfg) const {
    const auto it = recognizers.find(cfg.recognizer);
    if (it == recognizers.end()) fail(Errc::config_error, "unknown recognizer: " + cfg.recognizer);
    return it->second;
  }
  PickPlanFn pick_planner(const PipelineConfig& cfg) const {
    const auto it = pick_planners.find(cfg.pick_planner);
    if (it == pick_planners.end()) {
      fail(Errc::config_error, "unknown pick planner: " + cfg.pick_planner);
    }
    return it->second;
  }
  MotionPlanFn motion_planner(const PipelineConfig& cfg) const {
    const auto it = motion_planners.find(cfg.motion_planner);
    if (it == motion_planners.end()) {
      fail(Errc::config_error, "unknown motion planner: " + cfg.motion_planner);
    }
    return it->second;
  }

  // Throws before any execution when a required stage is missing.
  void validate(const PipelineConfig& cfg, bool needs_recognition) const {
    (void)segmenter(cfg);
    if (needs_recognition) (void)recognizer(cfg);
    (void)pick_planner(cfg);
    (void)motion_planner(cfg);
  }
};

inline StageRegistry default_registry() {
  StageRegistry reg;
  reg.segmenters["background_diff"] = [](const PipelineConfig& cfg) -> SegmentFn {
    const int min_cells = cfg.min_component_cells;
    return [min_cells](const Observation& obs, const Observation& bg) {
      return baseline::background_diff(obs, bg, min_cells);
    };
  };
  reg.recognizers["majority_label"] = baseline::majority_label;
  reg.pick_planners["foreground_centroid"] = baseline::foreground_centroid;
  reg.motion_planners["straight_line"] = baseline::straight_line;

  reg.segmenters["oracle"] = [](const PipelineConfig&) -> SegmentFn { return oracle::segment; };
  reg.recognizers["oracle"] = oracle::recognize;
  reg.pick_planners["oracle"] = oracle::pick;
  return reg;
}

struct Perception {
  std::vector<DetectionBox> boxes;
  std::vector<ClassPrediction> predictions;  // empty when recognition is skipped
  std::vector<PickPose> picks;               // one per box
  StageTimings timings;
  bool recognition_used = false;
};

namespace detail {

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename F>
auto run_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const BenchError& e) {
    throw BenchError(e.code(), std::string(stage) + " stage: " + e.what());
  }
}

}  // namespace detail

// One perception pass: segment -> [recognize] -> pick plan per box.
// Recognition is skipped when `use_recognition` is false (the pick-and-place
// protocol), and its timing stays exactly zero in that case.
inline Perception run_pipeline(const Observation& obs, const Observation& background,
                               const StageRegistry& registry, const PipelineConfig& cfg,
                               bool use_recognition) {
  registry.validate(cfg, use_recognition);
  Perception out;

  {
    detail::StopWatch t;
    const SegmentFn segment = registry.segmenter(cfg);
    out.boxes = detail::run_stage("segmentation", [&] { return segment(obs, background); });
    out.timings.segmentation_s = t.seconds();
  }
  if (use_recognition) {
    detail::StopWatch t;
    const RecognizeFn recognize = registry.recognizer(cfg);
    out.predictions = detail::run_stage("recognition", [&] { return recognize(obs, out.boxes); });
    out.timings.recognition_s = t.seconds();
    out.recognition_used = true;
  }
  {
    detail::StopWatch t;
    const PickPlanFn plan = registry.pick_planner(cfg);
    for (const DetectionBox& box : out.boxes) {
      out.picks.push_back(detail::run_stage("pick planning", [&] { return plan(obs, box); }));
    }
    out.timings.pick_planning_s = t.seconds();
  }
  return out;
}

}  // namespace jigsawbench::pipeline
