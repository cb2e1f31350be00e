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
#include <deque>
#include <vector>

#include "infersim/block_pool.hpp"
#include "infersim/request.hpp"

namespace infersim {

enum class PreemptionPolicy { kRecompute, kSwap };

struct SchedulerConfig {
  std::int64_t max_num_seqs = 256;
  std::int64_t max_num_batched_tokens = 2048;
  std::int64_t block_size = 16;
  PreemptionPolicy preemption_policy = PreemptionPolicy::kRecompute;
  double gpu_memory_utilization = 0.9;
  // Fraction of a preempted request's KV recovered on re-admission; the
  // default models the full prefix miss observed under memory exhaustion.
  double prefix_hit_fraction = 0.0;
  double swap_host_bandwidth = 64e9;  // bytes/s, Swap policy only
};

void validate(const SchedulerConfig& cfg);

struct PrefillChunk {
  std::int64_t request_id = 0;
  std::int64_t tokens = 0;
};

/// The work selected for one engine step, in scheduling priority order:
/// decodes first (one token each), then chunked prefills, then admissions.
struct StepPlan {
  std::vector<std::int64_t> decode_set;
  std::vector<PrefillChunk> prefill_chunks;
  std::vector<std::int64_t> admissions;
  std::vector<std::int64_t> preemptions;
  // KV tokens resident for the decode set after extension, fed to the
  // bandwidth term of the step cost.
  std::int64_t decode_kv_tokens = 0;
  double swap_seconds = 0.0;  // host transfer cost incurred by this plan
  bool decode_alloc_failed = false;
  bool prefill_alloc_failed = false;

  std::int64_t decode_tokens() const {
    return static_cast<std::int64_t>(decode_set.size());
  }
  std::int64_t prefill_tokens() const {
    std::int64_t total = 0;
    for (const auto& c : prefill_chunks) total += c.tokens;
    return total;
  }
  bool makes_progress() const {
    return !decode_set.empty() || !prefill_chunks.empty() ||
           !admissions.empty();
  }
};

/// Per-replica scheduler state. `running` is kept in admission order so the
/// back is always the most recently admitted request (the LIFO victim).
struct ReplicaQueues {
  std::deque<std::int64_t> waiting;
  std::vector<std::int64_t> running;
  std::int64_t next_admission_seq = 0;
  std::int64_t preemptions_cum = 0;
};

/// Evicts the most recently admitted running request: frees its blocks,
/// re-queues it at the waiting head, bumps its preemption count. Under
/// Recompute the KV must be rebuilt from prefix_hit_fraction of its tokens;
/// under Swap the state survives on the host and `plan` (when given)
/// absorbs the transfer cost. Returns the victim id.
std::int64_t preempt(ReplicaQueues& queues, std::vector<Request>& requests,
                     BlockPool& pool, const SchedulerConfig& cfg,
                     std::int64_t kv_bytes_per_token, double now,
                     StepPlan* plan);

/// Builds one deterministic FCFS continuous-batching step:
///   1. extend every running decode by one token, preempting LIFO victims
///      until the survivors fit;
///   2. continue chunked prefills in admission order under the remaining
///      token budget;
///   3. admit waiting requests FCFS while seats, budget, and blocks for the
///      next chunk remain.
/// Mutates queue membership, request states, and pool allocations.
StepPlan schedule_step(ReplicaQueues& queues, std::vector<Request>& requests,
                       BlockPool& pool, const SchedulerConfig& cfg,
                       std::int64_t kv_bytes_per_token, double now);

/// Applies one decode completion at simulation time `now`: bumps `decoded`,
/// stamps the first token exactly once, and finishes the request when the
/// target output length is reached.
void on_decode_token(Request& request, double now);

}  // namespace infersim
