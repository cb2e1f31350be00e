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
#include <string>
#include <utility>
#include <vector>

#include "infersim/hardware.hpp"
#include "infersim/model.hpp"
#include "infersim/parallelism.hpp"
#include "infersim/perf_model.hpp"
#include "infersim/scheduler.hpp"
#include "infersim/workload.hpp"

namespace infersim {

/// A fully resolved simulation input. Presets are resolved before this point;
/// the engine never touches the filesystem.
struct Scenario {
  std::string name = "scenario";
  ModelSpec model;
  HardwareSpec hardware;
  ParallelismConfig parallelism;
  SchedulerConfig scheduler;
  WorkloadSpec workload;
  std::int64_t telemetry_sample_interval = 8;
};

/// Throws std::invalid_argument / std::runtime_error on inconsistent inputs
/// (unknown presets are caught earlier, at load time).
void validate(const Scenario& scenario);

struct TelemetrySample {
  double sim_time = 0;
  std::int64_t running = 0;
  std::int64_t waiting = 0;
  std::int64_t preempted_cum = 0;
  double kv_utilization = 0;
  double tokens_per_s = 0;
  double modeled_bw_util = 0;
  double modeled_sm_util = 0;
};

struct Telemetry {
  // One strictly time-ordered series per DP replica.
  std::vector<std::vector<TelemetrySample>> replicas;

  bool empty() const;
  /// Per-replica rows resampled onto a shared uniform grid (linear
  /// interpolation), for cross-replica aggregation in reports.
  std::vector<std::vector<TelemetrySample>> merged(std::int64_t points) const;
};

/// Fixed-header CSV: sim_time,replica,running,waiting,preempted_cum,kv_util,
/// tokens_per_s,bw_util,sm_util.
std::string telemetry_to_csv(const Telemetry& telemetry);

struct RequestRecord {
  std::int64_t id = 0;
  int replica = 0;
  std::int64_t isl = 0;
  std::int64_t osl = 0;
  double ttft = 0;
  double tpot_mean = 0;
  double e2e = 0;
  double wait_seconds = 0;
  double run_seconds = 0;
  std::int64_t preemption_count = 0;
};

struct LatencyStats {
  double mean = 0;
  double p50 = 0;
  double p99 = 0;
};

struct RunSummary {
  std::vector<RequestRecord> per_request;
  LatencyStats ttft, tpot, e2e, wait, run;
  double makespan_seconds = 0;
  double tokens_per_second = 0;
  std::int64_t total_preemptions = 0;
  double peak_kv_utilization = 0;

  // Step-level diagnostics.
  std::int64_t total_steps = 0;
  double decode_wall_fraction = 0;  // share of time in steps that decode
  double prefill_sm_util_mean = 0;  // over prefill-only steps
  double prefill_bw_util_mean = 0;
  double decode_sm_util_mean = 0;  // over decode-only steps
  double decode_bw_util_mean = 0;
  // Phase of the first block-exhaustion event: "", "prefill" or "decode".
  std::string first_saturation_phase;
};

bool operator==(const RequestRecord& a, const RequestRecord& b);
bool operator==(const LatencyStats& a, const LatencyStats& b);
bool operator==(const RunSummary& a, const RunSummary& b);

/// Stable-field-name JSON export of a summary.
std::string summary_to_json(const RunSummary& summary);

/// Deterministic discrete-event run: requests are routed round-robin to DP
/// replicas at arrival; each replica loops schedule -> cost -> advance clock
/// -> apply progress until its share is finished. Throws on infeasible
/// placements (with the placement reason) and on requests whose full
/// footprint can never fit the replica pool.
std::pair<Telemetry, RunSummary> run(const Scenario& scenario);

/// Naive per-step re-simulation of the same rules with no incremental
/// state: pool occupancy and queue decisions are recomputed from scratch
/// every step. Guarded to <= 32 requests and <= 4096 total tokens.
RunSummary oracle_run(const Scenario& scenario);

struct SweepResult {
  std::string value;
  RunSummary summary;
  Telemetry telemetry;
};

/// Independent runs over one swept axis (max_num_seqs, num_requests,
/// parallelism, model), sharing the base workload seed; results are in
/// input-value order regardless of completion order. The model axis needs
/// `catalog`.
std::vector<SweepResult> sweep(const Scenario& base, const std::string& axis,
                               const std::vector<std::string>& values,
                               const ModelCatalog* catalog = nullptr);

}  // namespace infersim
