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
#include "infersim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace infersim {

void validate(const SchedulerConfig& cfg) {
  if (cfg.max_num_seqs < 1)
    throw std::invalid_argument("max_num_seqs must be >= 1");
  if (cfg.block_size < 1)
    throw std::invalid_argument("block_size must be >= 1");
  // The largest possible decode batch is max_num_seqs; the budget must
  // always be able to carry it.
  if (cfg.max_num_batched_tokens < std::max<std::int64_t>(1, cfg.max_num_seqs))
    throw std::invalid_argument(
        "max_num_batched_tokens must be >= max_num_seqs");
  if (cfg.gpu_memory_utilization <= 0 || cfg.gpu_memory_utilization > 1)
    throw std::invalid_argument("gpu_memory_utilization must be in (0, 1]");
  if (cfg.prefix_hit_fraction < 0 || cfg.prefix_hit_fraction > 1)
    throw std::invalid_argument("prefix_hit_fraction must be in [0, 1]");
  if (cfg.preemption_policy == PreemptionPolicy::kSwap &&
      cfg.swap_host_bandwidth <= 0)
    throw std::invalid_argument("swap_host_bandwidth must be positive");
}

std::int64_t preempt(ReplicaQueues& queues, std::vector<Request>& requests,
                     BlockPool& pool, const SchedulerConfig& cfg,
                     std::int64_t kv_bytes_per_token, double now,
                     StepPlan* plan) {
  if (queues.running.empty())
    throw std::logic_error("preempt called with an empty running set");
  const std::int64_t victim_id = queues.running.back();
  queues.running.pop_back();
  Request& victim = requests[victim_id];

  const std::int64_t held_tokens = pool.tokens_held(victim_id);
  pool.release(victim_id);

  victim.run_seconds += now - victim.last_transition;
  victim.last_transition = now;
  victim.state = RequestState::kPreempted;
  victim.preemption_count += 1;
  queues.preemptions_cum += 1;

  if (cfg.preemption_policy == PreemptionPolicy::kSwap) {
    // KV survives on the host: nothing to recompute, but the eviction
    // transfer is paid now and the restore on re-admission.
    victim.prefill_target = victim.kv_target_tokens();
    victim.prefilled = victim.prefill_target;
    if (plan)
      plan->swap_seconds += static_cast<double>(held_tokens) *
                            static_cast<double>(kv_bytes_per_token) /
                            cfg.swap_host_bandwidth;
  } else {
    // Recompute: blocks are gone; KV for prompt + generated tokens must be
    // rebuilt, minus whatever prefix the cache still recovers.
    victim.prefill_target = victim.kv_target_tokens();
    victim.prefilled = static_cast<std::int64_t>(
        std::floor(cfg.prefix_hit_fraction *
                   static_cast<double>(victim.prefill_target)));
  }

  queues.waiting.push_front(victim_id);
  if (plan) plan->preemptions.push_back(victim_id);
  return victim_id;
}

namespace {

// Moves the waiting-queue head into the running set at time `now`.
void admit(ReplicaQueues& queues, Request& r, double now) {
  queues.waiting.pop_front();
  r.state = RequestState::kRunning;
  r.wait_seconds += now - r.last_transition;
  r.last_transition = now;
  r.admission_seq = queues.next_admission_seq++;
  queues.running.push_back(r.id);
}

}  // namespace

StepPlan schedule_step(ReplicaQueues& queues, std::vector<Request>& requests,
                       BlockPool& pool, const SchedulerConfig& cfg,
                       std::int64_t kv_bytes_per_token, double now) {
  StepPlan plan;

  // 1. Decode reservations, oldest admission first. On exhaustion the
  //    youngest running request is evicted until the current decode fits
  //    (or turns out to be the victim itself).
  std::size_t i = 0;
  while (i < queues.running.size()) {
    const std::int64_t id = queues.running[i];
    Request& r = requests[id];
    if (!r.prefill_done() || r.decoded >= r.osl) {
      ++i;
      continue;
    }
    bool victim_was_self = false;
    while (!pool.extend(id, r.kv_target_tokens() + 1)) {
      plan.decode_alloc_failed = true;
      const std::int64_t victim =
          preempt(queues, requests, pool, cfg, kv_bytes_per_token, now, &plan);
      if (victim == id) {
        victim_was_self = true;
        break;
      }
    }
    if (victim_was_self) continue;  // running[i] is now a different request
    plan.decode_set.push_back(id);
    plan.decode_kv_tokens += pool.tokens_held(id);
    ++i;
  }

  std::int64_t budget = cfg.max_num_batched_tokens - plan.decode_tokens();

  // 2. Chunked prefill of running-but-unprefilled requests, FCFS.
  for (const std::int64_t id : queues.running) {
    if (budget <= 0) break;
    Request& r = requests[id];
    if (r.prefill_done()) continue;
    const std::int64_t want =
        std::min(budget, r.prefill_target - r.prefilled);
    const std::int64_t chunk = std::min(want, pool.max_extend_tokens(id));
    if (chunk <= 0) {
      if (want > 0) plan.prefill_alloc_failed = true;
      continue;
    }
    pool.extend(id, pool.tokens_held(id) + chunk);
    plan.prefill_chunks.push_back(PrefillChunk{id, chunk});
    budget -= chunk;
  }

  // 3. FCFS admissions: seats, budget, and blocks for the next chunk. A
  //    blocked head blocks the queue; skipping would break arrival order.
  while (!queues.waiting.empty() &&
         static_cast<std::int64_t>(queues.running.size()) < cfg.max_num_seqs &&
         budget > 0) {
    const std::int64_t id = queues.waiting.front();
    Request& r = requests[id];

    if (r.prefill_done()) {
      // Swap restore (or a full prefix hit): the whole allocation must
      // materialize at once; no prefill tokens are spent.
      const std::int64_t need = r.prefill_target;
      if (pool.max_admit_tokens() < need) {
        plan.prefill_alloc_failed = true;
        break;
      }
      pool.try_allocate(id, need);
      if (cfg.preemption_policy == PreemptionPolicy::kSwap &&
          r.preemption_count > 0)
        plan.swap_seconds += static_cast<double>(need) *
                             static_cast<double>(kv_bytes_per_token) /
                             cfg.swap_host_bandwidth;
      admit(queues, r, now);
      plan.admissions.push_back(id);
      continue;
    }

    const std::int64_t want =
        std::min(budget, r.prefill_target - r.prefilled);
    const std::int64_t chunk =
        std::min(want, pool.max_admit_tokens() - r.prefilled);
    if (chunk <= 0) {
      plan.prefill_alloc_failed = true;
      break;
    }
    pool.try_allocate(id, r.prefilled + chunk);
    admit(queues, r, now);
    plan.admissions.push_back(id);
    plan.prefill_chunks.push_back(PrefillChunk{id, chunk});
    budget -= chunk;
  }

  return plan;
}

void on_decode_token(Request& request, double now) {
  if (request.state != RequestState::kRunning)
    throw std::logic_error("decode token applied to a non-running request");
  if (!request.prefill_done())
    throw std::logic_error("decode token applied before prefill completed");
  request.decoded += 1;
  if (!request.first_token_time) request.first_token_time = now;
  if (request.decoded >= request.osl) {
    request.finish_time = now;
    request.state = RequestState::kFinished;
  }
}

}  // namespace infersim
