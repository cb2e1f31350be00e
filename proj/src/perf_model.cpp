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
#include "infersim/perf_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace infersim {

namespace {

void finalize_utils(StepTiming& t) {
  if (t.step_seconds > 0) {
    t.modeled_sm_util = t.compute_seconds / t.step_seconds;
    t.modeled_bw_util = t.memory_seconds / t.step_seconds;
  }
}

}  // namespace

StepTiming step_cost(std::int64_t prefill_tokens, std::int64_t decode_n,
                     std::int64_t decode_kv_tokens, const ModelSpec& model,
                     const HardwareSpec& hw, const ParallelismConfig& cfg) {
  if (prefill_tokens < 0 || decode_n < 0 || decode_kv_tokens < 0)
    throw std::invalid_argument("step token counts must be >= 0");
  const double shards = cfg.shards_per_replica();
  const std::int64_t tokens = prefill_tokens + decode_n;

  StepTiming t;
  t.compute_seconds = flops_per_token(model) * static_cast<double>(tokens) /
                      (shards * hw.peak_flops * hw.compute_efficiency);

  const double weight_read =
      static_cast<double>(active_weight_bytes(model)) / shards;
  const double kv_read = static_cast<double>(decode_kv_tokens) *
                         static_cast<double>(kv_bytes_per_token(model)) /
                         shards;
  t.memory_seconds =
      (weight_read + kv_read) / (hw.hbm_bandwidth * hw.mem_efficiency);

  const double activation_bytes = static_cast<double>(tokens) *
                                  static_cast<double>(model.hidden_size) *
                                  static_cast<double>(model.dtype_bytes) /
                                  cfg.tp;
  t.comm_seconds = 2.0 * static_cast<double>(model.num_layers) *
                   allreduce_time(activation_bytes, cfg.tp, hw);
  if (model.is_moe() && decode_n > 0)
    t.comm_seconds +=
        static_cast<double>(model.moe_layers()) * hw.moe_route_latency;

  t.step_seconds = std::max(t.compute_seconds, t.memory_seconds) +
                   t.comm_seconds + hw.step_launch_overhead;
  finalize_utils(t);
  return t;
}

StepTiming prefill_chunk_time(std::int64_t chunk_tokens,
                              const ModelSpec& model, const HardwareSpec& hw,
                              const ParallelismConfig& cfg) {
  if (chunk_tokens < 1)
    throw std::invalid_argument("chunk_tokens must be >= 1");
  return step_cost(chunk_tokens, 0, 0, model, hw, cfg);
}

StepTiming decode_step_time(std::int64_t n, std::int64_t total_kv_tokens,
                            const ModelSpec& model, const HardwareSpec& hw,
                            const ParallelismConfig& cfg) {
  if (n < 1) throw std::invalid_argument("decode batch must be >= 1");
  return step_cost(0, n, total_kv_tokens, model, hw, cfg);
}

StepTiming pp_overlay(const StepTiming& base, int pp,
                      std::int64_t microbatches, std::int64_t batch_tokens,
                      const ModelSpec& model, const HardwareSpec& hw) {
  if (pp == 1) return base;
  StepTiming t = base;
  const std::int64_t m = std::max<std::int64_t>(1, microbatches);
  const double f = pp_bubble_fraction(pp, m);
  // Bubble plus the scheduling cost of launching each microbatch.
  t.bubble_seconds = base.step_seconds * f / (1.0 - f) +
                     static_cast<double>(m - 1) * hw.step_launch_overhead;

  const double transfer = static_cast<double>(pp - 1) *
                          static_cast<double>(batch_tokens) *
                          static_cast<double>(model.hidden_size) *
                          static_cast<double>(model.dtype_bytes) /
                          hw.link_bandwidth;
  t.comm_seconds += transfer;
  t.step_seconds = base.step_seconds + t.bubble_seconds + transfer;
  finalize_utils(t);
  return t;
}

StepTiming replica_step_time(std::int64_t prefill_tokens,
                             std::int64_t decode_n,
                             std::int64_t decode_kv_tokens,
                             std::int64_t running_seqs,
                             const ModelSpec& model, const HardwareSpec& hw,
                             const ParallelismConfig& cfg) {
  StepTiming base =
      step_cost(prefill_tokens, decode_n, decode_kv_tokens, model, hw, cfg);
  if (cfg.pp == 1) return base;
  const std::int64_t m = std::max<std::int64_t>(1, running_seqs / cfg.pp);
  return pp_overlay(base, cfg.pp, m, prefill_tokens + decode_n, model, hw);
}

}  // namespace infersim
