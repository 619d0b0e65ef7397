#pragma once

// Plain-text key-value configuration: [section] headers, key = value lines,
// '#' comments. Unknown sections and keys are hard errors so typos cannot
// silently change a benchmark run.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jigsawbench/errors.hpp"
#include "jigsawbench/pipeline.hpp"
#include "jigsawbench/tasks.hpp"
#include "jigsawbench/world.hpp"

namespace jigsawbench::config {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<Section> parse_ini(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(Errc::config_error, "line " + std::to_string(lineno) + ": unterminated section header");
      }
      sections.push_back(Section{trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Errc::config_error, "line " + std::to_string(lineno) + ": expected key = value");
    }
    if (sections.empty()) sections.push_back(Section{"", {}});
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (e.key.empty()) {
      fail(Errc::config_error, "line " + std::to_string(lineno) + ": empty key");
    }
    sections.back().entries.push_back(std::move(e));
  }
  return sections;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::config_error, "cannot open file: " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline double parse_double(const Entry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(Errc::config_error, "line " + std::to_string(e.line) + ": '" + e.key +
                                 "' expects a number, got '" + e.value + "'");
  }
}

inline long long parse_int(const Entry& e) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(Errc::config_error, "line " + std::to_string(e.line) + ": '" + e.key +
                                 "' expects an integer, got '" + e.value + "'");
  }
}

// Profile keys shared by the [profile] section and standalone profile files.
// `arm = ur10e` / `camera = d435` select built-in parts; dotted keys
// override individual fields of `base`.
inline world::HardwareProfile profile_from_entries(const std::vector<Entry>& entries,
                                                   world::HardwareProfile base = {}) {
  world::HardwareProfile profile = std::move(base);
  // First pass: part selection, so overrides can follow in any order.
  std::string arm_name, cam_name, explicit_name;
  for (const Entry& e : entries) {
    if (e.key == "arm") {
      const auto arm = world::builtin_arm(e.value);
      if (!arm) fail(Errc::config_error, "unknown arm profile: " + e.value);
      profile.arm = *arm;
      arm_name = e.value;
    } else if (e.key == "camera") {
      const auto cam = world::builtin_camera(e.value);
      if (!cam) fail(Errc::config_error, "unknown camera profile: " + e.value);
      profile.camera = *cam;
      cam_name = e.value;
    } else if (e.key == "name") {
      explicit_name = e.value;
    }
  }
  if (!explicit_name.empty()) {
    profile.name = explicit_name;
  } else if (!arm_name.empty() || !cam_name.empty()) {
    profile.name = (arm_name.empty() ? "custom" : arm_name) + "+" +
                   (cam_name.empty() ? "custom" : cam_name);
  }

  for (const Entry& e : entries) {
    if (e.key == "arm" || e.key == "camera" || e.key == "name") continue;
    if (e.key == "arm.joint_count") {
      const long long v = parse_int(e);
      if (v != 6 && v != 7) fail(Errc::config_error, "arm.joint_count must be 6 or 7");
      profile.arm.joint_count = static_cast<int>(v);
    } else if (e.key == "arm.max_joint_speed") {
      profile.arm.max_joint_speed_rad_s = parse_double(e);
    } else if (e.key == "arm.reach") {
      profile.arm.reach_mm = parse_double(e);
    } else if (e.key == "arm.repeatability") {
      profile.arm.repeatability_mm = parse_double(e);
    } else if (e.key == "camera.resolution") {
      const auto x = e.value.find('x');
      if (x == std::string::npos) {
        fail(Errc::config_error, "camera.resolution expects WxH, got '" + e.value + "'");
      }
      profile.camera.resolution_w = static_cast<int>(
          parse_int(Entry{e.key, e.value.substr(0, x), e.line}));
      profile.camera.resolution_h = static_cast<int>(
          parse_int(Entry{e.key, e.value.substr(x + 1), e.line}));
    } else if (e.key == "camera.scale") {
      profile.camera.scale_mm_per_px = parse_double(e);
      if (profile.camera.scale_mm_per_px <= 0.0) {
        fail(Errc::config_error, "camera.scale must be positive");
      }
    } else if (e.key == "camera.localization_sigma") {
      profile.camera.localization_sigma_mm = parse_double(e);
    } else if (e.key == "camera.label_confusion") {
      profile.camera.label_confusion = parse_double(e);
    } else if (e.key == "gripper.type") {
      if (e.value != "suction") fail(Errc::config_error, "gripper.type supports only 'suction'");
      profile.gripper.type = e.value;
    } else if (e.key == "gripper.capture_margin") {
      profile.gripper.capture_margin_mm = parse_double(e);
    } else if (e.key == "gripper.approach_dwell") {
      profile.gripper.approach_dwell_s = parse_double(e);
    } else {
      fail(Errc::config_error,
           "line " + std::to_string(e.line) + ": unknown profile key '" + e.key + "'");
    }
  }
  return profile;
}

// Standalone profile file: flat key = value lines, same schema, no sections.
inline world::HardwareProfile load_profile_file(const std::string& path) {
  const auto sections = parse_ini(read_file(path));
  std::vector<Entry> entries;
  for (const Section& s : sections) {
    if (!s.name.empty() && s.name != "profile") {
      fail(Errc::config_error, "profile file has unexpected section [" + s.name + "]");
    }
    entries.insert(entries.end(), s.entries.begin(), s.entries.end());
  }
  return profile_from_entries(entries);
}

struct RunConfig {
  tasks::TaskSpec task;
  world::HardwareProfile profile;
  pipeline::PipelineConfig pipeline;
  int repeats = 10;
  std::uint64_t base_seed = 42;
  int jobs = 1;
  std::string output_path = "report.json";
  bool dump_obs = false;
};

inline RunConfig run_config_from_ini(const std::vector<Section>& sections) {
  RunConfig cfg;
  bool saw_task = false;
  for (const Section& s : sections) {
    if (s.name == "task") {
      saw_task = true;
      for (const Entry& e : s.entries) {
        if (e.key == "kind") {
          const auto kind = tasks::parse_task_kind(e.value);
          if (!kind) fail(Errc::config_error, "unknown task kind: " + e.value);
          cfg.task.kind = *kind;
        } else if (e.key == "code") {
          cfg.task.code = e.value;
        } else if (e.key == "clearance_mm") {
          cfg.task.clearance_mm = parse_double(e);
        } else if (e.key == "max_actions") {
          cfg.task.max_actions = static_cast<int>(parse_int(e));
        } else {
          fail(Errc::config_error, "unknown [task] key '" + e.key + "'");
        }
      }
    } else if (s.name == "profile") {
      // `profile = <builtin>` or `file = <path>` select a base; remaining
      // keys (part names, dotted overrides) refine it.
      std::vector<Entry> rest;
      for (const Entry& e : s.entries) {
        if (e.key == "profile") {
          const auto p = world::builtin_profile(e.value);
          if (!p) fail(Errc::config_error, "unknown built-in profile: " + e.value);
          cfg.profile = *p;
        } else if (e.key == "file") {
          cfg.profile = load_profile_file(e.value);
        } else {
          rest.push_back(e);
        }
      }
      if (!rest.empty()) {
        cfg.profile = profile_from_entries(rest, cfg.profile);
      }
    } else if (s.name == "pipeline") {
      for (const Entry& e : s.entries) {
        if (e.key == "segmenter") {
          cfg.pipeline.segmenter = e.value;
        } else if (e.key == "recognizer") {
          cfg.pipeline.recognizer = e.value;
        } else if (e.key == "pick_planner") {
          cfg.pipeline.pick_planner = e.value;
        } else if (e.key == "motion_planner") {
          cfg.pipeline.motion_planner = e.value;
        } else if (e.key == "min_component_cells") {
          cfg.pipeline.min_component_cells = static_cast<int>(parse_int(e));
        } else {
          fail(Errc::config_error, "unknown [pipeline] key '" + e.key + "'");
        }
      }
    } else if (s.name == "harness") {
      for (const Entry& e : s.entries) {
        if (e.key == "repeats") {
          cfg.repeats = static_cast<int>(parse_int(e));
          if (cfg.repeats < 1) fail(Errc::config_error, "repeats must be >= 1");
        } else if (e.key == "base_seed") {
          cfg.base_seed = static_cast<std::uint64_t>(parse_int(e));
        } else if (e.key == "jobs") {
          cfg.jobs = static_cast<int>(parse_int(e));
          if (cfg.jobs < 1) fail(Errc::config_error, "jobs must be >= 1");
        } else if (e.key == "output") {
          cfg.output_path = e.value;
        } else {
          fail(Errc::config_error, "unknown [harness] key '" + e.key + "'");
        }
      }
    } else {
      fail(Errc::config_error, "unknown config section [" + s.name + "]");
    }
  }
  if (!saw_task) {
    fail(Errc::config_error, "config is missing the [task] section");
  }
  (void)jigsaw::parse_code(cfg.task.code);  // surface code errors at config time
  if (cfg.task.max_actions < 4) {
    fail(Errc::config_error, "max_actions must be at least 4");
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  return run_config_from_ini(parse_ini(read_file(path)));
}

}  // namespace jigsawbench::config
