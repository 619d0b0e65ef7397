// Command-line front end: generate jigsaw sets, run benchmark suites,
// compare reports and run the geometry verification oracles.
//
// Exit codes: 0 success, 1 configuration error, 2 trial failures occurred,
// 3 oracle discrepancy exceeded tolerance.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jigsawbench/jigsawbench.hpp"

namespace {

using jigsawbench::BenchError;
namespace jb = jigsawbench;

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    jb::fail(jb::Errc::config_error, "cannot write file: " + path);
  }
  out << content;
}

nlohmann::ordered_json polygon_json(const jb::geom::Polygon& p) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const jb::geom::Vec2 v : p.vertices) {
    arr.push_back({v.x, v.y});
  }
  return arr;
}

nlohmann::ordered_json jigsaw_set_json(const jb::jigsaw::JigsawSet& set) {
  nlohmann::ordered_json j;
  j["code"] = jb::jigsaw::format_code(set.code);
  j["clearance_mm"] = set.clearance_mm;
  nlohmann::ordered_json pieces = nlohmann::ordered_json::array();
  auto piece_json = [](const jb::jigsaw::PieceSpec& p) {
    nlohmann::ordered_json pj;
    pj["id"] = p.id;
    pj["kind"] = p.kind == jb::jigsaw::PieceKind::base_plate ? "base_plate" : "fragment";
    pj["texture"] = p.texture;
    pj["thickness_mm"] = p.thickness_mm;
    pj["vertices_mm"] = polygon_json(p.shape);
    return pj;
  };
  if (set.base) pieces.push_back(piece_json(*set.base));
  for (const jb::jigsaw::PieceSpec& f : set.fragments) pieces.push_back(piece_json(f));
  j["pieces"] = std::move(pieces);
  j["cavity"] = polygon_json(set.cavity);
  j["standard_area_mm2"] = set.standard_area_mm2;
  return j;
}

int cmd_gen(const std::string& code, double clearance, const std::string& out_path) {
  const jb::jigsaw::JigsawSet set = jb::jigsaw::generate_set(code, clearance);
  const std::string doc = jigsaw_set_json(set).dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << doc;
  } else {
    write_text_file(out_path, doc);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

void dump_observations(const jb::config::RunConfig& cfg) {
  // Debug dump: trial 0's initial observation as a text PGM.
  const std::uint64_t seed = cfg.base_seed;
  jb::tasks::TaskSetup setup = jb::tasks::setup_task(cfg.task, seed);
  const jb::sensing::Observation obs =
      jb::sensing::render(setup.world, cfg.profile.camera, jb::rng::substream(seed, "obs", 0));
  std::filesystem::path p(cfg.output_path);
  p.replace_extension("");
  write_text_file(p.string() + "_obs_t0_a0.pgm", obs.to_pgm());
}

int cmd_run(const jb::config::RunConfig& cfg) {
  const jb::pipeline::StageRegistry registry = jb::pipeline::default_registry();
  const jb::harness::SuiteResult suite = jb::harness::run_suite(cfg, registry);

  write_text_file(cfg.output_path, suite.report.dump(2) + "\n");
  std::filesystem::path csv(cfg.output_path);
  csv.replace_extension(".csv");
  write_text_file(csv.string(), jb::report::csv_report(suite.report));
  if (cfg.dump_obs) dump_observations(cfg);

  const auto& agg = suite.report["aggregates"];
  std::cout << "task " << suite.report["config"]["task"]["kind"].get<std::string>() << ", profile "
            << suite.report["config"]["profile"]["name"].get<std::string>() << ", "
            << cfg.repeats << " trials\n";
  if (agg.contains("score")) {
    std::cout << "  score        " << agg["score"]["mean"].get<double>() << " ± "
              << agg["score"]["std"].get<double>() << "\n";
  }
  for (const char* key : {"mean_iou", "ap", "success_rate", "grasp_time_s"}) {
    if (agg.contains(key)) {
      std::cout << "  " << std::string(key) << std::string(13 - std::string(key).size(), ' ')
                << agg[key]["mean"].get<double>() << " ± " << agg[key]["std"].get<double>() << "\n";
    }
  }
  std::cout << "report: " << cfg.output_path << " (csv: " << csv.string() << ")\n";
  if (suite.failed_trials > 0) {
    std::cerr << suite.failed_trials << " trial(s) failed; see report for details\n";
    return 2;
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, double threshold) {
  std::vector<nlohmann::ordered_json> reports;
  for (const std::string& p : paths) {
    reports.push_back(jb::report::load_report(p));
  }
  const jb::report::Comparison cmp = jb::report::compare(reports, threshold);
  std::cout << jb::report::format_comparison(cmp);
  return 0;
}

int cmd_oracle(const std::string& kind, int samples, std::uint64_t seed) {
  const jb::oracles::OracleReport rep = jb::oracles::run_oracle(kind, samples, seed);
  std::cout << "oracle " << rep.kind << ": " << rep.cases << " cases, max discrepancy "
            << rep.max_discrepancy << " (tolerance " << rep.tolerance << "), "
            << (rep.pass ? "PASS" : "FAIL") << " in " << rep.seconds << " s\n";
  return rep.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jigsaw manipulation benchmark simulator"};
  app.require_subcommand(1);

  // gen
  std::string gen_code = "000101";
  double gen_clearance = 0.6;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "generate a jigsaw set as JSON");
  gen->add_option("--code", gen_code, "6-digit jigsaw code")->required();
  gen->add_option("--clearance", gen_clearance, "assembly clearance in mm");
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  // run
  std::string run_config_path;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  int run_repeats = 0;
  std::string run_out;
  int run_jobs = 0;
  bool run_dump_obs = false;
  CLI::App* run = app.add_subcommand("run", "run a configured benchmark suite");
  run->add_option("--config", run_config_path, "run configuration file")->required();
  run->add_option("--seed", run_seed, "base seed override")->each([&](const std::string&) {
    run_seed_set = true;
  });
  run->add_option("--repeats", run_repeats, "repeat count override");
  run->add_option("--out", run_out, "report path override");
  run->add_option("--jobs", run_jobs, "worker thread count");
  run->add_flag("--dump-obs", run_dump_obs, "dump observation grids as PGM files");

  // compare
  std::vector<std::string> cmp_paths;
  double cmp_threshold = 0.05;
  CLI::App* cmp = app.add_subcommand("compare", "compare two or more reports");
  cmp->add_option("reports", cmp_paths, "report JSON files")->expected(2, -1)->required();
  cmp->add_option("--threshold", cmp_threshold, "flagging threshold (fraction)");

  // oracle
  std::string oracle_kind;
  int oracle_samples = 0;
  std::uint64_t oracle_seed = 7;
  CLI::App* orc = app.add_subcommand("oracle", "run a geometry verification oracle");
  orc->add_option("--kind", oracle_kind, "iou_mc | mbr_sweep | winding | clip_mc")->required();
  orc->add_option("--samples", oracle_samples, "number of randomized instances");
  orc->add_option("--seed", oracle_seed, "oracle seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_code, gen_clearance, gen_out);
    }
    if (run->parsed()) {
      jb::config::RunConfig cfg = jb::config::load_run_config(run_config_path);
      if (run_seed_set) cfg.base_seed = run_seed;
      if (run_repeats > 0) cfg.repeats = run_repeats;
      if (!run_out.empty()) cfg.output_path = run_out;
      if (run_jobs > 0) cfg.jobs = run_jobs;
      if (run_dump_obs) cfg.dump_obs = true;
      return cmd_run(cfg);
    }
    if (cmp->parsed()) {
      return cmd_compare(cmp_paths, cmp_threshold);
    }
    if (orc->parsed()) {
      return cmd_oracle(oracle_kind, oracle_samples, oracle_seed);
    }
  } catch (const BenchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool config_side = e.code() == jb::Errc::config_error ||
                             e.code() == jb::Errc::bad_length ||
                             e.code() == jb::Errc::bad_digit ||
                             e.code() == jb::Errc::unsupported_value ||
                             e.code() == jb::Errc::incompatible_tasks;
    return config_side ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
