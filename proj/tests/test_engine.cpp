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
#include "doctest.h"
#include "infersim/engine.hpp"
#include "test_support.hpp"

using namespace infersim;
using namespace infersim::testing;

namespace {

Scenario tiny_scenario(std::int64_t n, std::int64_t isl, std::int64_t osl,
                       std::int64_t pool_tokens, int dp = 1) {
  Scenario s;
  s.name = "unit";
  s.model = tiny_model();
  s.scheduler.max_num_seqs = 16;
  s.scheduler.max_num_batched_tokens = 64;
  s.scheduler.block_size = 4;
  s.scheduler.gpu_memory_utilization = 1.0;
  s.workload = fixed_workload(n, isl, osl);
  s.parallelism.dp = dp;
  s.hardware = tiny_hardware(s.model, pool_tokens, dp);
  s.telemetry_sample_interval = 1;
  return s;
}

}  // namespace

TEST_SUITE("sim-engine") {

TEST_CASE("single request runs one prefill step and osl decode steps") {
  Scenario s = tiny_scenario(1, 16, 2, 64);
  const auto [telemetry, summary] = run(s);

  CHECK(summary.total_steps == 3);
  REQUIRE(summary.per_request.size() == 1);
  const auto& r = summary.per_request[0];

  // Recompute the three step durations through the same cost model the
  // engine uses and check the loop stitched them together correctly.
  const auto prefill =
      replica_step_time(16, 0, 0, 1, s.model, s.hardware, s.parallelism);
  const auto decode1 =
      replica_step_time(0, 1, 17, 1, s.model, s.hardware, s.parallelism);
  const auto decode2 =
      replica_step_time(0, 1, 18, 1, s.model, s.hardware, s.parallelism);
  CHECK(r.ttft ==
        doctest::Approx(prefill.step_seconds + decode1.step_seconds));
  CHECK(r.e2e == doctest::Approx(prefill.step_seconds + decode1.step_seconds +
                                 decode2.step_seconds));
  CHECK(r.e2e == doctest::Approx(r.wait_seconds + r.run_seconds));
  CHECK(r.tpot_mean == doctest::Approx(r.e2e - r.ttft));
  CHECK(summary.decode_wall_fraction > 0);
}

TEST_CASE("round-robin routing gives identical replicas identical telemetry") {
  Scenario s = tiny_scenario(10, 8, 4, 64, /*dp=*/2);
  const auto [telemetry, summary] = run(s);
  REQUIRE(telemetry.replicas.size() == 2);
  REQUIRE(telemetry.replicas[0].size() == telemetry.replicas[1].size());
  for (std::size_t i = 0; i < telemetry.replicas[0].size(); ++i) {
    const auto& a = telemetry.replicas[0][i];
    const auto& b = telemetry.replicas[1][i];
    CHECK(a.sim_time == b.sim_time);
    CHECK(a.running == b.running);
    CHECK(a.waiting == b.waiting);
    CHECK(a.kv_utilization == b.kv_utilization);
  }
  // five requests each
  std::int64_t counts[2] = {0, 0};
  for (const auto& r : summary.per_request) counts[r.replica] += 1;
  CHECK(counts[0] == 5);
  CHECK(counts[1] == 5);
}

TEST_CASE("oversubscribed pool thrashes: preemptions and full kv") {
  // Pool holds ~40 full footprints, 100 requests all admitted.
  const std::int64_t footprint = 16 + 48;
  Scenario s = tiny_scenario(100, 16, 48, 40 * footprint);
  s.scheduler.max_num_seqs = 100;
  s.scheduler.max_num_batched_tokens = 256;
  const auto [telemetry, summary] = run(s);
  CHECK(summary.total_preemptions > 0);
  CHECK(summary.peak_kv_utilization == 1.0);
  // decoded token accounting survives the thrash
  std::int64_t total_osl = 0;
  for (const auto& r : summary.per_request) total_osl += r.osl;
  CHECK(total_osl == 100 * 48);
}

TEST_CASE("per-request footprints above the pool abort with context") {
  Scenario s = tiny_scenario(1, 16, 48, 32);
  CHECK_THROWS_WITH_AS(run(s), doctest::Contains("KV blocks"),
                       std::runtime_error);
}

TEST_CASE("infeasible placements abort with the reason") {
  const auto& bundle = presets();
  Scenario s;
  s.model = bundle.models.at("llama-405b");
  s.hardware = bundle.hardware.at("h200-node");
  s.parallelism = {8, 1, 1};
  s.workload = fixed_workload(1, 16, 4);
  CHECK_THROWS_WITH_AS(run(s), doctest::Contains("infeasible"),
                       std::runtime_error);
}

TEST_CASE("reruns are bit-identical") {
  Scenario s = tiny_scenario(24, 12, 9, 160);
  s.workload.isl_hist.buckets = {HistogramBucket{4, 20, 1.0}};
  s.workload.osl_hist.buckets = {HistogramBucket{2, 16, 1.0}};
  const auto [telemetry_a, summary_a] = run(s);
  const auto [telemetry_b, summary_b] = run(s);
  CHECK(summary_a == summary_b);
  CHECK(summary_to_json(summary_a) == summary_to_json(summary_b));
  CHECK(telemetry_to_csv(telemetry_a) == telemetry_to_csv(telemetry_b));
}

TEST_CASE("waiting queue drains in arrival order under batch arrivals") {
  Scenario s = tiny_scenario(12, 8, 2, 4096);
  s.scheduler.max_num_seqs = 2;  // force waves
  const auto [telemetry, summary] = run(s);
  // earlier arrivals never finish after later ones at equal lengths
  for (std::size_t i = 1; i < summary.per_request.size(); ++i)
    CHECK(summary.per_request[i - 1].e2e <= summary.per_request[i].e2e + 1e-12);
}

TEST_CASE("poisson arrivals can idle the replica without stalling") {
  Scenario s = tiny_scenario(6, 8, 2, 4096);
  s.workload.arrival.kind = ArrivalKind::kPoisson;
  s.workload.arrival.poisson_rate = 0.5;  // sparse: engine must jump the clock
  const auto [telemetry, summary] = run(s);
  CHECK(summary.per_request.size() == 6);
  for (const auto& r : summary.per_request) CHECK(r.e2e > 0);
}

TEST_CASE("swap preemption charges host transfers instead of recompute") {
  const std::int64_t footprint = 16 + 32;
  Scenario s = tiny_scenario(6, 16, 32, 3 * footprint);
  s.scheduler.max_num_seqs = 6;
  s.scheduler.preemption_policy = PreemptionPolicy::kSwap;
  s.scheduler.swap_host_bandwidth = 1e6;
  const auto [telemetry, summary] = run(s);
  CHECK(summary.total_preemptions > 0);
  std::int64_t total_osl = 0;
  for (const auto& r : summary.per_request) total_osl += r.osl;
  CHECK(total_osl == 6 * 32);
}

TEST_CASE("single-value sweep equals a direct run") {
  Scenario s = tiny_scenario(8, 8, 4, 4096);
  const auto results = sweep(s, "max_num_seqs", {"16"});
  REQUIRE(results.size() == 1);
  const auto [telemetry, summary] = run(s);
  CHECK(results[0].summary == summary);
}

TEST_CASE("sweep orders results by input value, axes validated") {
  Scenario s = tiny_scenario(8, 8, 4, 4096);
  const auto results = sweep(s, "max_num_seqs", {"4", "2", "8"});
  REQUIRE(results.size() == 3);
  CHECK(results[0].value == "4");
  CHECK(results[1].value == "2");
  CHECK(results[2].value == "8");
  CHECK_THROWS_AS(sweep(s, "nonsense", {"1"}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(s, "model", {"ds-llama-8b"}), std::invalid_argument);
}

TEST_CASE("telemetry export carries the fixed header") {
  Scenario s = tiny_scenario(4, 8, 4, 4096);
  const auto [telemetry, summary] = run(s);
  const auto csv = telemetry_to_csv(telemetry);
  CHECK(csv.rfind("sim_time,replica,running,waiting,preempted_cum,kv_util,"
                  "tokens_per_s,bw_util,sm_util\n",
                  0) == 0);
  CHECK_FALSE(telemetry.empty());
  const auto merged = telemetry.merged(16);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].size() == 16);
  double prev = -1;
  for (const auto& sample : merged[0]) {
    CHECK(sample.sim_time > prev);
    prev = sample.sim_time;
  }
}

}  // TEST_SUITE
