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
#include "infersim/engine.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>
#include <string>

#include "run_stats.hpp"

namespace infersim {

void validate(const Scenario& scenario) {
  validate(scenario.model);
  validate(scenario.hardware);
  validate(scenario.scheduler);
  validate(scenario.workload);
  const auto& p = scenario.parallelism;
  if (p.dp < 1 || p.tp < 1 || p.pp < 1)
    throw std::invalid_argument("parallelism degrees must be >= 1");
  // Subsets of the node are allowed (dp sweeps shrink the footprint); the
  // product just cannot exceed the GPUs present.
  if (p.world_size() > scenario.hardware.num_gpus)
    throw std::invalid_argument(
        "parallelism " + p.to_string() + " needs " +
        std::to_string(p.world_size()) + " GPUs but hardware '" +
        scenario.hardware.name + "' has " +
        std::to_string(scenario.hardware.num_gpus));
  if (scenario.telemetry_sample_interval < 1)
    throw std::invalid_argument("telemetry_sample_interval must be >= 1");
}

namespace {

void engine_check(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("engine invariant: ") + what);
}

struct ReplicaResult {
  internal::StepAccounting accounting;
  std::vector<TelemetrySample> samples;
};

// Runs one DP replica's event loop to completion over its request share.
ReplicaResult run_replica(const Scenario& scenario,
                          std::vector<Request>& requests,
                          const std::vector<std::int64_t>& assigned,
                          int replica_index) {
  const SchedulerConfig& sched = scenario.scheduler;
  const std::int64_t kv_bpt = kv_bytes_per_token(scenario.model);
  const PlacementReport place =
      placement(scenario.model, scenario.hardware, scenario.parallelism, sched);

  BlockPool pool(place.kv_pool_tokens_per_replica / sched.block_size,
                 sched.block_size);
  for (const std::int64_t id : assigned) {
    const Request& r = requests[id];
    const std::int64_t blocks =
        (r.full_footprint_tokens() + sched.block_size - 1) / sched.block_size;
    if (blocks > pool.total_blocks())
      throw std::runtime_error(
          "request " + std::to_string(id) + " needs " + std::to_string(blocks) +
          " KV blocks at its peak but the replica pool holds " +
          std::to_string(pool.total_blocks()) +
          "; it could never finish (shrink isl+osl or free more headroom)");
  }

  ReplicaQueues queues;
  ReplicaResult result;
  double clock = 0;
  double pending_seconds = 0;  // swap costs from zero-progress plans
  std::int64_t step_index = 0;
  std::size_t next_arrival = 0;
  std::int64_t finished = 0;
  double last_sample_time = 0;
  std::int64_t tokens_since_sample = 0;

  auto ingest = [&]() {
    while (next_arrival < assigned.size() &&
           requests[assigned[next_arrival]].arrival_time <= clock) {
      queues.waiting.push_back(assigned[next_arrival]);
      ++next_arrival;
    }
  };

  while (finished < static_cast<std::int64_t>(assigned.size())) {
    ingest();
    if (queues.waiting.empty() && queues.running.empty()) {
      engine_check(next_arrival < assigned.size(),
                   "idle replica with no pending arrivals");
      clock = std::max(clock, requests[assigned[next_arrival]].arrival_time);
      continue;
    }

    StepPlan plan =
        schedule_step(queues, requests, pool, sched, kv_bpt, clock);

    engine_check(plan.decode_tokens() + plan.prefill_tokens() <=
                     sched.max_num_batched_tokens,
                 "step exceeds max_num_batched_tokens");
    engine_check(static_cast<std::int64_t>(queues.running.size()) <=
                     sched.max_num_seqs,
                 "running set exceeds max_num_seqs");
    pool.check_conservation();

    if (!plan.makes_progress()) {
      pending_seconds += plan.swap_seconds;
      if (!queues.running.empty()) {
        // Every runnable request is mid-prefill and block-starved; evict the
        // youngest so the seniors can move.
        StepPlan stall;
        preempt(queues, requests, pool, sched, kv_bpt, clock, &stall);
        pending_seconds += stall.swap_seconds;
        continue;
      }
      if (next_arrival < assigned.size()) {
        clock = std::max(clock, requests[assigned[next_arrival]].arrival_time);
        continue;
      }
      throw std::logic_error("scheduler stalled with waiting requests");
    }

    const StepTiming timing = replica_step_time(
        plan.prefill_tokens(), plan.decode_tokens(), plan.decode_kv_tokens,
        static_cast<std::int64_t>(queues.running.size()), scenario.model,
        scenario.hardware, scenario.parallelism);
    const double charged =
        timing.step_seconds + plan.swap_seconds + pending_seconds;
    pending_seconds = 0;
    clock += charged;

    for (const auto& chunk : plan.prefill_chunks)
      requests[chunk.request_id].prefilled += chunk.tokens;
    for (const std::int64_t id : plan.decode_set) {
      Request& r = requests[id];
      on_decode_token(r, clock);
      tokens_since_sample += 1;
      if (r.state == RequestState::kFinished) {
        pool.release(id);
        r.run_seconds += clock - r.last_transition;
        r.last_transition = clock;
        queues.running.erase(
            std::find(queues.running.begin(), queues.running.end(), id));
        ++finished;
      }
    }

    result.accounting.note_step(plan.prefill_tokens(), plan.decode_tokens(),
                                plan.decode_alloc_failed,
                                plan.prefill_alloc_failed, timing, charged,
                                clock);

    if (step_index % scenario.telemetry_sample_interval == 0) {
      TelemetrySample s;
      s.sim_time = clock;
      s.running = static_cast<std::int64_t>(queues.running.size());
      s.waiting = static_cast<std::int64_t>(queues.waiting.size());
      s.preempted_cum = queues.preemptions_cum;
      s.kv_utilization = pool.utilization();
      const double span = clock - last_sample_time;
      s.tokens_per_s =
          span > 0 ? static_cast<double>(tokens_since_sample) / span : 0.0;
      s.modeled_bw_util = timing.modeled_bw_util;
      s.modeled_sm_util = timing.modeled_sm_util;
      result.samples.push_back(s);
      last_sample_time = clock;
      tokens_since_sample = 0;
    }
    ++step_index;
  }

  result.accounting.total_preemptions = queues.preemptions_cum;
  result.accounting.peak_kv_utilization = pool.peak_utilization();
  for (const std::int64_t id : assigned)
    requests[id].replica = replica_index;
  return result;
}

}  // namespace

std::pair<Telemetry, RunSummary> run(const Scenario& scenario) {
  validate(scenario);
  const PlacementReport place = placement(
      scenario.model, scenario.hardware, scenario.parallelism,
      scenario.scheduler);
  if (!place.feasible)
    throw std::runtime_error("infeasible placement " +
                             scenario.parallelism.to_string() + ": " +
                             place.infeasibility_reason);

  std::vector<Request> requests = sample_workload(scenario.workload);

  // Round-robin routing at arrival.
  std::vector<std::vector<std::int64_t>> assigned(
      static_cast<std::size_t>(scenario.parallelism.dp));
  for (const auto& r : requests)
    assigned[static_cast<std::size_t>(r.id % scenario.parallelism.dp)]
        .push_back(r.id);

  Telemetry telemetry;
  internal::StepAccounting accounting;
  for (int replica = 0; replica < scenario.parallelism.dp; ++replica) {
    ReplicaResult result = run_replica(
        scenario, requests, assigned[static_cast<std::size_t>(replica)],
        replica);
    telemetry.replicas.push_back(std::move(result.samples));
    accounting.merge(result.accounting);
  }

  // Token accounting identity: nothing lost across preemptions.
  std::int64_t decoded = 0, expected = 0;
  for (const auto& r : requests) {
    decoded += r.decoded;
    expected += r.osl;
  }
  engine_check(decoded == expected, "decoded tokens != workload OSL total");

  RunSummary summary = internal::summarize(requests, accounting);
  for (const auto& rec : summary.per_request) {
    const double residual =
        rec.e2e - (rec.wait_seconds + rec.run_seconds);
    engine_check(std::abs(residual) <= 1e-6 * std::max(1.0, rec.e2e),
                 "e2e != wait + run");
  }
  return {std::move(telemetry), std::move(summary)};
}

std::vector<SweepResult> sweep(const Scenario& base, const std::string& axis,
                               const std::vector<std::string>& values,
                               const ModelCatalog* catalog) {
  auto make_scenario = [&](const std::string& value) {
    Scenario s = base;
    if (axis == "max_num_seqs") {
      s.scheduler.max_num_seqs = std::stoll(value);
    } else if (axis == "num_requests" || axis == "batch_size") {
      s.workload.num_requests = std::stoll(value);
    } else if (axis == "parallelism") {
      s.parallelism = parse_parallelism(value);
    } else if (axis == "model") {
      if (!catalog)
        throw std::invalid_argument("model sweep needs a model catalog");
      s.model = catalog->at(value);
    } else {
      throw std::invalid_argument(
          "invalid sweep axis '" + axis +
          "' (expected max_num_seqs, num_requests, parallelism or model)");
    }
    return s;
  };

  // Scenarios share no mutable state; fan out and gather in input order.
  std::vector<std::future<std::pair<Telemetry, RunSummary>>> futures;
  futures.reserve(values.size());
  for (const auto& value : values) {
    Scenario s = make_scenario(value);
    futures.push_back(std::async(std::launch::async,
                                 [scenario = std::move(s)] { return run(scenario); }));
  }
  std::vector<SweepResult> results;
  results.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [telemetry, summary] = futures[i].get();
    results.push_back(SweepResult{values[i], std::move(summary),
                                  std::move(telemetry)});
  }
  return results;
}

}  // namespace infersim
