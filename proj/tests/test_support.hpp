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

#include <random>

#include "infersim/engine.hpp"
#include "infersim/scenario_io.hpp"

namespace infersim::testing {

inline const PresetBundle& presets() {
  static const PresetBundle bundle = load_presets(INFERSIM_PRESET_DIR);
  return bundle;
}

/// Minimal model whose per-token KV cost is 2*L*kv*dh*dtype bytes; handy for
/// pools with human-sized block counts.
inline ModelSpec tiny_model(std::int64_t layers = 1, std::int64_t head_dim = 2,
                            std::int64_t dtype = 1) {
  ModelSpec m;
  m.name = "tiny";
  m.num_layers = layers;
  m.hidden_size = head_dim;
  m.num_heads = 1;
  m.num_kv_heads = 1;
  m.head_dim = head_dim;
  m.total_params = 1'000'000;
  m.active_params = 1'000'000;
  m.dtype_bytes = dtype;
  return m;
}

/// Hardware sized so the replica pool holds exactly `pool_tokens` of KV for
/// `model` at the given scheduler settings (tp = pp = 1, full utilization).
inline HardwareSpec tiny_hardware(const ModelSpec& model,
                                  std::int64_t pool_tokens, int num_gpus = 1,
                                  double gpu_memory_utilization = 1.0) {
  HardwareSpec hw;
  hw.name = "tiny-hw";
  hw.num_gpus = num_gpus;
  const double pool_bytes = static_cast<double>(pool_tokens) *
                            static_cast<double>(kv_bytes_per_token(model));
  hw.hbm_capacity = (static_cast<double>(weight_bytes(model)) + pool_bytes) /
                    gpu_memory_utilization;
  hw.hbm_bandwidth = 1e12;
  hw.peak_flops = 1e15;
  hw.link_bandwidth = 1e11;
  hw.link_latency = 1e-6;
  hw.mem_efficiency = 0.8;
  hw.compute_efficiency = 0.5;
  hw.activation_reserve_fraction = 0.0;
  return hw;
}

inline WorkloadSpec fixed_workload(std::int64_t n, std::int64_t isl,
                                   std::int64_t osl, std::uint64_t seed = 1) {
  WorkloadSpec spec;
  spec.num_requests = n;
  spec.isl_hist.buckets = {HistogramBucket{isl, isl, 1.0}};
  spec.osl_hist.buckets = {HistogramBucket{osl, osl, 1.0}};
  spec.seed = seed;
  return spec;
}

/// Randomized tiny scenario for engine/oracle equivalence; sized within the
/// oracle guard and above the per-request footprint floor.
inline Scenario random_tiny_scenario(std::mt19937_64& rng) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(
                                              hi - lo + 1));
  };
  Scenario s;
  s.name = "tiny";
  s.model = tiny_model(pick(1, 2), 2, 1);
  s.scheduler.block_size = pick(1, 4);
  s.scheduler.max_num_seqs = pick(1, 4);
  s.scheduler.max_num_batched_tokens = s.scheduler.max_num_seqs + pick(4, 64);
  s.scheduler.gpu_memory_utilization = 1.0;
  if (pick(0, 3) == 0) s.scheduler.prefix_hit_fraction = 0.5;
  if (pick(0, 4) == 0) {
    s.scheduler.preemption_policy = PreemptionPolicy::kSwap;
    s.scheduler.swap_host_bandwidth = 1e6;
  }

  const std::int64_t n = pick(1, 8);
  const std::int64_t max_isl = 24, max_osl = 12;
  s.workload.num_requests = n;
  s.workload.isl_hist.buckets = {HistogramBucket{1, max_isl, 1.0}};
  s.workload.osl_hist.buckets = {HistogramBucket{1, max_osl, 1.0}};
  s.workload.seed = rng();
  if (pick(0, 1) == 0) {
    s.workload.arrival.kind = ArrivalKind::kPoisson;
    s.workload.arrival.poisson_rate = 1000.0;
  }

  const std::int64_t dp = pick(1, 2);
  s.parallelism.dp = static_cast<int>(dp);
  // Pool between one request's worst footprint and a comfortably scarce
  // multiple, so preemption paths get exercised.
  const std::int64_t floor_tokens =
      ((max_isl + max_osl + s.scheduler.block_size - 1) /
       s.scheduler.block_size) *
      s.scheduler.block_size;
  const std::int64_t pool_tokens = floor_tokens + pick(0, 2 * floor_tokens);
  s.hardware = tiny_hardware(s.model, pool_tokens, static_cast<int>(dp));
  s.telemetry_sample_interval = 1;
  return s;
}

}  // namespace infersim::testing
