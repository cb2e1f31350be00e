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
#include <optional>

namespace infersim {

enum class RequestState { kWaiting, kRunning, kPreempted, kFinished };

/// One inference request's lifecycle. `prefilled` tracks progress toward
/// `prefill_target`, which is the prompt length on first admission and
/// isl + decoded when KV must be rebuilt after a recompute preemption
/// (generated tokens are kept; their cache is not).
struct Request {
  std::int64_t id = 0;
  double arrival_time = 0.0;
  std::int64_t isl = 0;
  std::int64_t osl = 0;

  RequestState state = RequestState::kWaiting;
  std::int64_t prefilled = 0;
  std::int64_t prefill_target = 0;
  std::int64_t decoded = 0;
  std::optional<double> first_token_time;
  std::optional<double> finish_time;
  std::int64_t preemption_count = 0;

  // Waiting/Running decomposition bookkeeping.
  double wait_seconds = 0.0;
  double run_seconds = 0.0;
  double last_transition = 0.0;

  std::int64_t admission_seq = -1;
  int replica = 0;

  bool prefill_done() const { return prefilled >= prefill_target; }
  /// KV tokens this request needs resident to resume or continue decode.
  std::int64_t kv_target_tokens() const { return isl + decoded; }
  /// Blocks needed at peak (decoding the final token).
  std::int64_t full_footprint_tokens() const { return isl + osl; }
};

}  // namespace infersim
