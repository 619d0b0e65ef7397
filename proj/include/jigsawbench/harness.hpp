#pragma once

// Suite runner: `repeats` independent trials with seeds base_seed + index,
// optionally spread over a worker pool. Records merge in trial-index order,
// so the report body is identical for any worker count.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "jigsawbench/config.hpp"
#include "jigsawbench/errors.hpp"
#include "jigsawbench/pipeline.hpp"
#include "jigsawbench/report.hpp"
#include "jigsawbench/tasks.hpp"

namespace jigsawbench::harness {

struct SuiteResult {
  report::json report;
  int failed_trials = 0;
};

inline SuiteResult run_suite(const config::RunConfig& cfg,
                             const pipeline::StageRegistry& registry) {
  // Config problems surface before any trial runs. Seed-dependent failures
  // (e.g. infeasible placement) stay per-trial.
  registry.validate(cfg.pipeline, tasks::uses_recognition(cfg.task.kind));
  const jigsaw::JigsawCode code = jigsaw::parse_code(cfg.task.code);
  if (tasks::is_assembly(cfg.task.kind) && !code.has_base_plate()) {
    fail(Errc::no_base_plate, "assembly task needs a base plate (code digit d4 must be 1)");
  }
  if (cfg.task.max_actions < 4) {
    fail(Errc::config_error, "max_actions must be at least 4");
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<report::TrialRecord> records(static_cast<std::size_t>(cfg.repeats));

  auto run_trial = [&](int index) {
    report::TrialRecord& rec = records[static_cast<std::size_t>(index)];
    rec.trial_index = index;
    rec.seed = cfg.base_seed + static_cast<std::uint64_t>(index);
    try {
      rec.outcome = tasks::run_task(cfg.task, cfg.profile, cfg.pipeline, registry, rec.seed);
    } catch (const BenchError& e) {
      rec.error = e.what();
    }
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || cfg.repeats == 1) {
    for (int i = 0; i < cfg.repeats; ++i) run_trial(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, cfg.repeats);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        while (true) {
          const int i = next.fetch_add(1);
          if (i >= cfg.repeats) break;
          run_trial(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  SuiteResult result;
  result.report = report::build_report(cfg, records, wall);
  result.failed_trials = result.report["failed_trials"].get<int>();
  return result;
}

}  // namespace jigsawbench::harness
