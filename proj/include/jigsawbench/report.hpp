#pragma once

// Benchmark report assembly: one JSON document per run (the source of
// truth) plus a flat CSV of per-trial metrics. Wall-clock timings are
// recorded but live under "wall_clock" keys, which are stripped from the
// hashable body so reports stay byte-comparable across machines and worker
// counts.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jigsawbench/config.hpp"
#include "jigsawbench/rng.hpp"
#include "jigsawbench/tasks.hpp"
#include "jigsawbench/version.hpp"

namespace jigsawbench::report {

using json = nlohmann::ordered_json;

struct TrialRecord {
  int trial_index = 0;
  std::uint64_t seed = 0;
  std::optional<tasks::TrialOutcome> outcome;
  std::string error;  // non-empty when the trial failed
};

inline json pose_json(const geom::Pose2& p) {
  return json{{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

inline json config_json(const config::RunConfig& cfg) {
  json j;
  j["task"] = {{"kind", tasks::task_kind_name(cfg.task.kind)},
               {"code", cfg.task.code},
               {"clearance_mm", cfg.task.clearance_mm},
               {"max_actions", cfg.task.max_actions}};
  j["profile"] = {
      {"name", cfg.profile.name},
      {"arm",
       {{"joint_count", cfg.profile.arm.joint_count},
        {"max_joint_speed_rad_s", cfg.profile.arm.max_joint_speed_rad_s},
        {"reach_mm", cfg.profile.arm.reach_mm},
        {"repeatability_mm", cfg.profile.arm.repeatability_mm}}},
      {"camera",
       {{"resolution_px", {cfg.profile.camera.resolution_w, cfg.profile.camera.resolution_h}},
        {"scale_mm_per_px", cfg.profile.camera.scale_mm_per_px},
        {"localization_sigma_mm", cfg.profile.camera.localization_sigma_mm},
        {"label_confusion", cfg.profile.camera.label_confusion}}},
      {"gripper",
       {{"type", cfg.profile.gripper.type},
        {"capture_margin_mm", cfg.profile.gripper.capture_margin_mm},
        {"approach_dwell_s", cfg.profile.gripper.approach_dwell_s}}}};
  j["pipeline"] = {{"segmenter", cfg.pipeline.segmenter},
                   {"recognizer", cfg.pipeline.recognizer},
                   {"pick_planner", cfg.pipeline.pick_planner},
                   {"motion_planner", cfg.pipeline.motion_planner},
                   {"min_component_cells", cfg.pipeline.min_component_cells}};
  j["harness"] = {{"repeats", cfg.repeats}, {"base_seed", cfg.base_seed}};
  return j;
}

inline std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << h;
  return os.str();
}

inline json action_json(const tasks::ActionRecord& a) {
  json j;
  j["action_index"] = a.action_index;
  j["box_index"] = a.box_index;
  j["target_piece_id"] = a.target_piece_id;
  j["obs_mean_iou"] = a.obs_mean_iou;
  j["obs_ap"] = a.obs_ap;
  if (a.box_index >= 0) {
    j["pick"] = {{"x", a.pick.x}, {"y", a.pick.y}, {"angle", a.pick.angle}};
    j["pick_success"] = a.pick_success;
    j["place_target"] = pose_json(a.place_target);
    if (a.landed) {
      j["landed"] = pose_json(*a.landed);
      j["z_layer"] = a.z_layer;
      j["snapped"] = a.snapped;
      j["placement_error_mm"] = a.placement_error_mm;
    }
    j["pick_elapsed_s"] = a.pick_elapsed_s;
    j["place_elapsed_s"] = a.place_elapsed_s;
    j["planned_duration_s"] = a.planned_duration_s;
  }
  j["wall_clock"] = {{"segmentation_s", a.timings.segmentation_s},
                     {"recognition_s", a.timings.recognition_s},
                     {"pick_planning_s", a.timings.pick_planning_s},
                     {"motion_planning_s", a.timings.motion_planning_s}};
  return j;
}

inline json trial_json(const TrialRecord& rec) {
  json j;
  j["trial_index"] = rec.trial_index;
  j["seed"] = rec.seed;
  if (!rec.error.empty()) {
    j["error"] = rec.error;
    return j;
  }
  const tasks::TaskResult& r = rec.outcome->result;
  json res;
  res["score"] = r.score;
  if (r.area_rate) res["area_rate"] = *r.area_rate;
  if (r.completion) res["completion"] = *r.completion;
  res["stacking_flag"] = r.stacking_flag;
  res["placed_count"] = r.placed_count;
  res["actions_used"] = r.actions_used;
  res["metrics"] = {{"mean_iou", r.metrics.mean_iou},
                    {"ap", r.metrics.ap},
                    {"recognition_used", r.metrics.recognition_used},
                    {"success_rate", r.metrics.success_rate},
                    {"grasp_time_s", r.metrics.grasp_time_s}};
  j["result"] = std::move(res);
  json actions = json::array();
  for (const tasks::ActionRecord& a : rec.outcome->actions) actions.push_back(action_json(a));
  j["actions"] = std::move(actions);
  j["wall_clock"] = {{"segmentation_s", r.metrics.timings.segmentation_s},
                     {"recognition_s", r.metrics.timings.recognition_s},
                     {"pick_planning_s", r.metrics.timings.pick_planning_s},
                     {"motion_planning_s", r.metrics.timings.motion_planning_s}};
  return j;
}

struct Stats {
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
  int n = 0;
};

inline Stats stats_of(const std::vector<double>& values) {
  Stats s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  s.min = values.front();
  s.max = values.front();
  for (const double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) var += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(var / static_cast<double>(values.size()));  // population
  return s;
}

inline json stats_json(const Stats& s) {
  return json{{"mean", s.mean}, {"std", s.std_dev}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
}

inline const std::vector<std::string>& aggregate_metric_keys() {
  static const std::vector<std::string> keys{"score",    "area_rate",    "completion",
                                             "mean_iou", "ap",           "success_rate",
                                             "grasp_time_s", "actions_used"};
  return keys;
}

// Pulls one metric value out of a trial's JSON, mirroring how aggregates are
// recomputed on load.
inline std::optional<double> metric_from_trial(const json& trial, const std::string& key) {
  if (!trial.contains("result")) return std::nullopt;
  const json& r = trial["result"];
  if (key == "score" || key == "area_rate" || key == "completion" || key == "actions_used") {
    if (!r.contains(key)) return std::nullopt;
    return r[key].get<double>();
  }
  const json& m = r["metrics"];
  if (!m.contains(key)) return std::nullopt;
  return m[key].get<double>();
}

inline json aggregates_from_trials(const json& trials) {
  json agg;
  for (const std::string& key : aggregate_metric_keys()) {
    std::vector<double> values;
    for (const json& t : trials) {
      if (const auto v = metric_from_trial(t, key)) values.push_back(*v);
    }
    if (!values.empty()) agg[key] = stats_json(stats_of(values));
  }
  int stacked = 0;
  int scored = 0;
  for (const json& t : trials) {
    if (!t.contains("result")) continue;
    ++scored;
    if (t["result"].value("stacking_flag", false)) ++stacked;
  }
  if (scored > 0) {
    agg["stacking_rate"] = static_cast<double>(stacked) / static_cast<double>(scored);
  }
  return agg;
}

// The deterministic body: everything except wall-clock times and the hash
// itself.
inline void strip_wall_clock(json& j) {
  if (j.is_object()) {
    j.erase("wall_clock");
    j.erase("body_hash");
    for (auto& [k, v] : j.items()) strip_wall_clock(v);
  } else if (j.is_array()) {
    for (json& v : j) strip_wall_clock(v);
  }
}

inline std::string hashable_body(const json& report) {
  json body = report;
  strip_wall_clock(body);
  return body.dump();
}

inline json build_report(const config::RunConfig& cfg, const std::vector<TrialRecord>& records,
                         double suite_wall_s) {
  json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["config"] = config_json(cfg);
  j["config_hash"] = hash_hex(rng::fnv1a(j["config"].dump()));
  json trials = json::array();
  int failed = 0;
  for (const TrialRecord& rec : records) {
    if (!rec.error.empty()) ++failed;
    trials.push_back(trial_json(rec));
  }
  j["trials"] = std::move(trials);
  j["failed_trials"] = failed;
  j["aggregates"] = aggregates_from_trials(j["trials"]);
  j["body_hash"] = hash_hex(rng::fnv1a(hashable_body(j)));
  j["wall_clock"] = {{"suite_s", suite_wall_s}};
  return j;
}

// Self-consistency check: aggregates must be exactly recomputable from the
// embedded records.
inline void verify_report(const json& report) {
  if (!report.contains("trials") || !report.contains("aggregates")) {
    fail(Errc::config_error, "report is missing trials or aggregates");
  }
  const json recomputed = aggregates_from_trials(report["trials"]);
  if (recomputed != report["aggregates"]) {
    fail(Errc::config_error, "report aggregates do not match embedded trial records");
  }
}

inline json load_report(const std::string& path) {
  json j = json::parse(config::read_file(path));
  verify_report(j);
  return j;
}

inline std::string csv_report(const json& report) {
  std::ostringstream os;
  os << "trial_index,seed,score,area_rate,completion,stacking_flag,mean_iou,ap,"
        "success_rate,grasp_time_s,actions_used,error\n";
  for (const json& t : report["trials"]) {
    os << t.value("trial_index", 0) << "," << t.value("seed", 0ull) << ",";
    if (t.contains("result")) {
      const json& r = t["result"];
      const json& m = r["metrics"];
      os << r["score"].get<double>() << ",";
      os << (r.contains("area_rate") ? std::to_string(r["area_rate"].get<double>()) : "") << ",";
      os << (r.contains("completion") ? std::to_string(r["completion"].get<double>()) : "") << ",";
      os << (r.value("stacking_flag", false) ? 1 : 0) << ",";
      os << m["mean_iou"].get<double>() << "," << m["ap"].get<double>() << ","
         << m["success_rate"].get<double>() << "," << m["grasp_time_s"].get<double>() << ","
         << r["actions_used"].get<int>() << ",";
    } else {
      os << ",,,,,,,,,";
    }
    os << (t.contains("error") ? t["error"].get<std::string>() : "") << "\n";
  }
  return os.str();
}

// --- report comparison -------------------------------------------------------

struct MetricDelta {
  std::string metric;
  std::vector<Stats> stats;  // one per report
  double delta = 0.0;        // last minus first mean
  double rel_pct = 0.0;
  bool flagged = false;
};

struct Comparison {
  std::string task_kind;
  std::vector<std::string> labels;
  std::vector<MetricDelta> rows;
  double threshold = 0.05;
};

inline bool is_ratio_metric(const std::string& key) {
  return key == "score" || key == "area_rate" || key == "completion" || key == "mean_iou" ||
         key == "ap" || key == "success_rate";
}

// Side-by-side aggregate comparison. Ratio metrics flag on an absolute mean
// difference above `threshold` (percentage points); other metrics flag on
// the same relative difference.
inline Comparison compare(const std::vector<json>& reports, double threshold = 0.05) {
  if (reports.size() < 2) {
    fail(Errc::incompatible_tasks, "compare needs at least two reports");
  }
  Comparison cmp;
  cmp.threshold = threshold;
  cmp.task_kind = reports.front()["config"]["task"]["kind"].get<std::string>();
  for (const json& r : reports) {
    const std::string kind = r["config"]["task"]["kind"].get<std::string>();
    if (kind != cmp.task_kind) {
      fail(Errc::incompatible_tasks,
           "cannot compare task kinds '" + cmp.task_kind + "' and '" + kind + "'");
    }
    cmp.labels.push_back(r["config"]["profile"]["name"].get<std::string>());
  }

  for (const std::string& key : aggregate_metric_keys()) {
    bool in_all = true;
    for (const json& r : reports) {
      if (!r["aggregates"].contains(key)) in_all = false;
    }
    if (!in_all) continue;
    MetricDelta row;
    row.metric = key;
    for (const json& r : reports) {
      const json& s = r["aggregates"][key];
      Stats st;
      st.mean = s["mean"].get<double>();
      st.std_dev = s["std"].get<double>();
      st.min = s["min"].get<double>();
      st.max = s["max"].get<double>();
      st.n = s["n"].get<int>();
      row.stats.push_back(st);
    }
    row.delta = row.stats.back().mean - row.stats.front().mean;
    const double base = std::abs(row.stats.front().mean);
    row.rel_pct = base > 1e-12 ? 100.0 * row.delta / base : 0.0;
    row.flagged = is_ratio_metric(key) ? std::abs(row.delta) > threshold
                                       : base > 1e-12 && std::abs(row.delta) / base > threshold;
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

inline std::string format_comparison(const Comparison& cmp) {
  std::ostringstream os;
  os << "task: " << cmp.task_kind << "   (flag threshold ";
  os << std::fixed << std::setprecision(0) << cmp.threshold * 100.0 << " points)\n";
  os << std::left << std::setw(16) << "metric";
  for (const std::string& label : cmp.labels) os << std::setw(24) << label;
  os << std::setw(12) << "delta" << std::setw(10) << "rel%" << "flag\n";
  os << std::setprecision(4);
  for (const MetricDelta& row : cmp.rows) {
    os << std::setw(16) << row.metric;
    for (const Stats& s : row.stats) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4) << s.mean << " ± " << s.std_dev;
      os << std::setw(24) << cell.str();
    }
    os << std::setw(12) << row.delta << std::setw(10) << row.rel_pct
       << (row.flagged ? "FLAG" : "-") << "\n";
  }
  return os.str();
}

}  // namespace jigsawbench::report
