/* Copyright 2026 The infersim Authors.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "infersim/engine.hpp"

namespace infersim {

struct PlanEntry {
  ParallelismConfig config;
  bool feasible = false;
  std::int64_t kv_pool_tokens = 0;
  double est_makespan = 0;  // meaningless when infeasible
  double est_ttft = 0;
  double est_tpot = 0;
  std::string rationale;
};

/// Scores every (dp, tp, pp) factorization of the GPU budget with a fast
/// analytical pipeline (no event loop): steady-state concurrency is capped
/// by seats and by pool capacity at the mean request footprint, decode cost
/// comes from the roofline model at that concurrency, and pipeline bubbles
/// and communication apply as in simulation. Entries are sorted by estimated
/// makespan ascending, infeasible last, ties broken on (dp, tp, pp).
std::vector<PlanEntry> plan(const ModelSpec& model, const HardwareSpec& hw,
                            const WorkloadStats& workload, int num_gpus,
                            const SchedulerConfig& sched);

std::string plan_to_json(const std::vector<PlanEntry>& entries);
/// Human-readable table for the CLI.
std::string plan_to_table(const std::vector<PlanEntry>& entries);

struct KvProjection {
  struct Point {
    std::int64_t tokens = 0;
    double bytes = 0;
  };
  std::vector<Point> points;
};

/// Evenly spaced points of the linear KV growth bytes = tokens * kv/token.
KvProjection kv_projection(const ModelSpec& model, std::int64_t max_tokens,
                           int num_points);

/// Writes the report bundle for a family of runs: per-run summary JSON and
/// telemetry CSV plus one declarative plot-data file per figure family
/// (throughput timeline, KV-utilization timeline, request-state timeline,
/// latency-vs-axis). Deterministic: identical inputs give identical bytes.
/// Throws when `results` is empty or any run has empty telemetry.
std::vector<std::filesystem::path> write_report(
    const std::vector<SweepResult>& results, const std::string& axis,
    const std::filesystem::path& out_dir);

}  // namespace infersim
