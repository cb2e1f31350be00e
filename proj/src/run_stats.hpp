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
#include <limits>
#include <string>
#include <vector>

#include "infersim/engine.hpp"

namespace infersim::internal {

/// Per-run step bookkeeping shared by the engine and the naive oracle so
/// both produce RunSummary through the same aggregation path.
struct StepAccounting {
  std::int64_t total_steps = 0;
  double total_step_seconds = 0;
  double decode_step_seconds = 0;  // steps carrying at least one decode token
  double prefill_sm_sum = 0, prefill_bw_sum = 0;
  std::int64_t prefill_only_steps = 0;
  double decode_sm_sum = 0, decode_bw_sum = 0;
  std::int64_t decode_only_steps = 0;
  double peak_kv_utilization = 0;
  std::int64_t total_preemptions = 0;
  std::string first_saturation_phase;
  double first_saturation_time = std::numeric_limits<double>::infinity();

  void note_step(std::int64_t prefill_tokens, std::int64_t decode_tokens,
                 bool decode_alloc_failed, bool prefill_alloc_failed,
                 const StepTiming& timing, double charged_seconds,
                 double clock_end);
  void merge(const StepAccounting& other);
};

RunSummary summarize(const std::vector<Request>& requests,
                     const StepAccounting& accounting);

}  // namespace infersim::internal
