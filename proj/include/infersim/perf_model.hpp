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

#include "infersim/hardware.hpp"
#include "infersim/model.hpp"
#include "infersim/parallelism.hpp"

namespace infersim {

/// Modeled wall-clock decomposition of one engine step. The utilizations are
/// model outputs (compute/step and memory/step), not measurements.
struct StepTiming {
  double step_seconds = 0;
  double compute_seconds = 0;
  double memory_seconds = 0;
  double comm_seconds = 0;
  double bubble_seconds = 0;
  double modeled_sm_util = 0;
  double modeled_bw_util = 0;
};

/// Roofline composition shared by all step kinds:
///   compute = flops/token * tokens / (tp*pp * peak * eta_sm)
///   memory  = (active weights + decode KV reads, sharded) / (bw * eta_mem)
///   step    = max(compute, memory) + comm + launch overhead
/// MoE routing latency is charged when the step decodes.
StepTiming step_cost(std::int64_t prefill_tokens, std::int64_t decode_n,
                     std::int64_t decode_kv_tokens, const ModelSpec& model,
                     const HardwareSpec& hw, const ParallelismConfig& cfg);

/// Compute-bound chunk cost (no KV read term, no pipeline overlay).
StepTiming prefill_chunk_time(std::int64_t chunk_tokens,
                              const ModelSpec& model, const HardwareSpec& hw,
                              const ParallelismConfig& cfg);

/// Bandwidth-bound decode cost for n concurrent sequences whose resident KV
/// totals `total_kv_tokens` (no pipeline overlay).
StepTiming decode_step_time(std::int64_t n, std::int64_t total_kv_tokens,
                            const ModelSpec& model, const HardwareSpec& hw,
                            const ParallelismConfig& cfg);

/// Pipeline-parallel overlay: inflates the base step by the bubble fraction
/// at m = max(1, running/pp) microbatches, adds the per-boundary activation
/// transfers and the per-microbatch launch cost. Identity when pp == 1.
StepTiming pp_overlay(const StepTiming& base, int pp,
                      std::int64_t microbatches, std::int64_t batch_tokens,
                      const ModelSpec& model, const HardwareSpec& hw);

/// step_cost followed by pp_overlay with m derived from the running set.
StepTiming replica_step_time(std::int64_t prefill_tokens,
                             std::int64_t decode_n,
                             std::int64_t decode_kv_tokens,
                             std::int64_t running_seqs,
                             const ModelSpec& model, const HardwareSpec& hw,
                             const ParallelismConfig& cfg);

}  // namespace infersim
