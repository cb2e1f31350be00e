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
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "run_stats.hpp"

// A deliberately naive re-simulation used as a correctness oracle for the
// incremental engine. It keeps no pool or counter state: free blocks, slack
// and utilization are recomputed by scanning every request on every query.
// The scheduling rules are restated here verbatim; only tiny scenarios are
// accepted, so the quadratic cost is irrelevant.

namespace infersim {

namespace {

struct NaiveState {
  std::vector<std::int64_t> tokens_held;  // 0 when not resident
  std::int64_t total_blocks = 0;
  std::int64_t block_size = 0;
  double peak_utilization = 0;

  std::int64_t blocks_for(std::int64_t tokens) const {
    return (tokens + block_size - 1) / block_size;
  }
  std::int64_t used_blocks() const {
    std::int64_t used = 0;
    for (std::int64_t t : tokens_held)
      if (t > 0) used += blocks_for(t);
    return used;
  }
  std::int64_t free_blocks() const { return total_blocks - used_blocks(); }
  double utilization() const {
    if (total_blocks == 0) return 0.0;
    return static_cast<double>(used_blocks()) /
           static_cast<double>(total_blocks);
  }
  void grow(std::int64_t id, std::int64_t new_total) {
    tokens_held[static_cast<std::size_t>(id)] = new_total;
    peak_utilization = std::max(peak_utilization, utilization());
  }
};

}  // namespace

RunSummary oracle_run(const Scenario& scenario) {
  validate(scenario);
  if (scenario.workload.num_requests > 32)
    throw std::invalid_argument("oracle_run is limited to 32 requests");

  const PlacementReport place = placement(
      scenario.model, scenario.hardware, scenario.parallelism,
      scenario.scheduler);
  if (!place.feasible)
    throw std::runtime_error("infeasible placement " +
                             scenario.parallelism.to_string() + ": " +
                             place.infeasibility_reason);

  std::vector<Request> requests = sample_workload(scenario.workload);
  std::int64_t total_tokens = 0;
  for (const auto& r : requests) total_tokens += r.isl + r.osl;
  if (total_tokens > 4096)
    throw std::invalid_argument("oracle_run is limited to 4096 total tokens");

  const SchedulerConfig& cfg = scenario.scheduler;
  const std::int64_t kv_bpt = kv_bytes_per_token(scenario.model);
  const std::int64_t pool_blocks =
      place.kv_pool_tokens_per_replica / cfg.block_size;

  std::vector<std::vector<std::int64_t>> assigned(
      static_cast<std::size_t>(scenario.parallelism.dp));
  for (const auto& r : requests)
    assigned[static_cast<std::size_t>(r.id % scenario.parallelism.dp)]
        .push_back(r.id);

  internal::StepAccounting accounting;

  for (int replica = 0; replica < scenario.parallelism.dp; ++replica) {
    internal::StepAccounting replica_acc;
    const auto& ids = assigned[static_cast<std::size_t>(replica)];
    for (const std::int64_t id : ids) {
      requests[id].replica = replica;
      const std::int64_t blocks =
          (requests[id].full_footprint_tokens() + cfg.block_size - 1) /
          cfg.block_size;
      if (blocks > pool_blocks)
        throw std::runtime_error("request " + std::to_string(id) +
                                 " can never fit the replica pool");
    }

    NaiveState pool;
    pool.tokens_held.assign(requests.size(), 0);
    pool.total_blocks = pool_blocks;
    pool.block_size = cfg.block_size;

    std::vector<std::int64_t> waiting, running;
    std::int64_t admission_seq = 0;
    std::int64_t preemptions_cum = 0;
    std::size_t next_arrival = 0;
    std::int64_t finished = 0;
    double clock = 0;
    double pending_seconds = 0;

    auto naive_preempt = [&](double now, double* swap_out) {
      const std::int64_t victim_id = running.back();
      running.pop_back();
      Request& victim = requests[victim_id];
      const std::int64_t held =
          pool.tokens_held[static_cast<std::size_t>(victim_id)];
      pool.tokens_held[static_cast<std::size_t>(victim_id)] = 0;
      victim.run_seconds += now - victim.last_transition;
      victim.last_transition = now;
      victim.state = RequestState::kPreempted;
      victim.preemption_count += 1;
      preemptions_cum += 1;
      if (cfg.preemption_policy == PreemptionPolicy::kSwap) {
        victim.prefill_target = victim.kv_target_tokens();
        victim.prefilled = victim.prefill_target;
        if (swap_out)
          *swap_out += static_cast<double>(held) *
                       static_cast<double>(kv_bpt) / cfg.swap_host_bandwidth;
      } else {
        victim.prefill_target = victim.kv_target_tokens();
        victim.prefilled = static_cast<std::int64_t>(
            std::floor(cfg.prefix_hit_fraction *
                       static_cast<double>(victim.prefill_target)));
      }
      waiting.insert(waiting.begin(), victim_id);
      return victim_id;
    };

    auto naive_admit = [&](std::int64_t id, double now) {
      waiting.erase(waiting.begin());
      Request& r = requests[id];
      r.state = RequestState::kRunning;
      r.wait_seconds += now - r.last_transition;
      r.last_transition = now;
      r.admission_seq = admission_seq++;
      running.push_back(id);
    };

    while (finished < static_cast<std::int64_t>(ids.size())) {
      while (next_arrival < ids.size() &&
             requests[ids[next_arrival]].arrival_time <= clock) {
        waiting.push_back(ids[next_arrival]);
        ++next_arrival;
      }
      if (waiting.empty() && running.empty()) {
        clock = std::max(clock, requests[ids[next_arrival]].arrival_time);
        continue;
      }

      std::vector<std::int64_t> decode_ids;
      std::vector<std::pair<std::int64_t, std::int64_t>> chunks;
      std::int64_t admissions = 0;
      std::int64_t decode_kv = 0;
      double swap_seconds = 0;
      bool decode_alloc_failed = false;
      bool prefill_alloc_failed = false;

      // 1. decode reservations, LIFO preemption on exhaustion
      std::size_t i = 0;
      while (i < running.size()) {
        const std::int64_t id = running[i];
        Request& r = requests[id];
        if (!r.prefill_done() || r.decoded >= r.osl) {
          ++i;
          continue;
        }
        const std::int64_t want_tokens = r.kv_target_tokens() + 1;
        bool victim_was_self = false;
        while (pool.blocks_for(want_tokens) -
                   pool.blocks_for(
                       pool.tokens_held[static_cast<std::size_t>(id)]) >
               pool.free_blocks()) {
          decode_alloc_failed = true;
          if (naive_preempt(clock, &swap_seconds) == id) {
            victim_was_self = true;
            break;
          }
        }
        if (victim_was_self) continue;
        pool.grow(id, want_tokens);
        decode_ids.push_back(id);
        decode_kv += want_tokens;
        ++i;
      }

      std::int64_t budget = cfg.max_num_batched_tokens -
                            static_cast<std::int64_t>(decode_ids.size());

      // 2. chunked prefill in admission order
      for (const std::int64_t id : running) {
        if (budget <= 0) break;
        Request& r = requests[id];
        if (r.prefill_done()) continue;
        const std::int64_t held =
            pool.tokens_held[static_cast<std::size_t>(id)];
        const std::int64_t slack =
            pool.blocks_for(held) * pool.block_size - held;
        const std::int64_t want =
            std::min(budget, r.prefill_target - r.prefilled);
        const std::int64_t chunk =
            std::min(want, slack + pool.free_blocks() * pool.block_size);
        if (chunk <= 0) {
          if (want > 0) prefill_alloc_failed = true;
          continue;
        }
        pool.grow(id, held + chunk);
        chunks.emplace_back(id, chunk);
        budget -= chunk;
      }

      // 3. FCFS admissions
      while (!waiting.empty() &&
             static_cast<std::int64_t>(running.size()) < cfg.max_num_seqs &&
             budget > 0) {
        const std::int64_t id = waiting.front();
        Request& r = requests[id];
        if (r.prefill_done()) {
          const std::int64_t need = r.prefill_target;
          if (pool.free_blocks() * pool.block_size < need) {
            prefill_alloc_failed = true;
            break;
          }
          pool.grow(id, need);
          if (cfg.preemption_policy == PreemptionPolicy::kSwap &&
              r.preemption_count > 0)
            swap_seconds += static_cast<double>(need) *
                            static_cast<double>(kv_bpt) /
                            cfg.swap_host_bandwidth;
          naive_admit(id, clock);
          ++admissions;
          continue;
        }
        const std::int64_t want =
            std::min(budget, r.prefill_target - r.prefilled);
        const std::int64_t chunk = std::min(
            want, pool.free_blocks() * pool.block_size - r.prefilled);
        if (chunk <= 0) {
          prefill_alloc_failed = true;
          break;
        }
        pool.grow(id, r.prefilled + chunk);
        naive_admit(id, clock);
        ++admissions;
        chunks.emplace_back(id, chunk);
        budget -= chunk;
      }

      const bool progress =
          !decode_ids.empty() || !chunks.empty() || admissions > 0;
      if (!progress) {
        pending_seconds += swap_seconds;
        if (!running.empty()) {
          naive_preempt(clock, &pending_seconds);
          continue;
        }
        if (next_arrival < ids.size()) {
          clock = std::max(clock, requests[ids[next_arrival]].arrival_time);
          continue;
        }
        throw std::logic_error("oracle stalled with waiting requests");
      }

      std::int64_t prefill_tokens = 0;
      for (const auto& [id, c] : chunks) prefill_tokens += c;
      const StepTiming timing = replica_step_time(
          prefill_tokens, static_cast<std::int64_t>(decode_ids.size()),
          decode_kv, static_cast<std::int64_t>(running.size()),
          scenario.model, scenario.hardware, scenario.parallelism);
      const double charged =
          timing.step_seconds + swap_seconds + pending_seconds;
      pending_seconds = 0;
      clock += charged;

      for (const auto& [id, c] : chunks) requests[id].prefilled += c;
      for (const std::int64_t id : decode_ids) {
        Request& r = requests[id];
        on_decode_token(r, clock);
        if (r.state == RequestState::kFinished) {
          pool.tokens_held[static_cast<std::size_t>(id)] = 0;
          r.run_seconds += clock - r.last_transition;
          r.last_transition = clock;
          running.erase(std::find(running.begin(), running.end(), id));
          ++finished;
        }
      }

      replica_acc.note_step(prefill_tokens,
                          static_cast<std::int64_t>(decode_ids.size()),
                          decode_alloc_failed, prefill_alloc_failed, timing,
                          charged, clock);
    }

    replica_acc.total_preemptions = preemptions_cum;
    replica_acc.peak_kv_utilization = pool.peak_utilization;
    accounting.merge(replica_acc);
  }

  return internal::summarize(requests, accounting);
}

}  // namespace infersim
