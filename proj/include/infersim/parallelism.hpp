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
#include <string>
#include <vector>

#include "infersim/hardware.hpp"
#include "infersim/model.hpp"
#include "infersim/scheduler.hpp"

namespace infersim {

struct ParallelismConfig {
  int dp = 1;
  int tp = 1;
  int pp = 1;

  int world_size() const { return dp * tp * pp; }
  int shards_per_replica() const { return tp * pp; }
  std::string to_string() const;
};

bool operator==(const ParallelismConfig& a, const ParallelismConfig& b);
bool operator<(const ParallelismConfig& a, const ParallelismConfig& b);

/// Parses "DxTxP" (e.g. "4x2x1").
ParallelismConfig parse_parallelism(const std::string& text);

struct PlacementReport {
  double weight_bytes_per_gpu = 0;
  double kv_headroom_per_gpu = 0;
  std::int64_t kv_pool_tokens_per_replica = 0;
  bool feasible = false;
  std::string infeasibility_reason;
};

/// All ordered (dp, tp, pp) triples with product num_gpus, lexicographic.
std::vector<ParallelismConfig> enumerate_configs(int num_gpus);

/// Memory arithmetic for one placement. TP shards and PP stages jointly hold
/// one replica's weights and KV, so shard headroom aggregates per replica.
/// Infeasible placements are values, not errors; the activation reserve only
/// gates feasibility, the headroom itself follows the capacity formula.
PlacementReport placement(const ModelSpec& model, const HardwareSpec& hw,
                          const ParallelismConfig& cfg,
                          const SchedulerConfig& sched);

/// Ring all-reduce: 2*(tp-1)/tp * bytes / link_bandwidth
///                  + 2*(tp-1) * link_latency. Zero when tp == 1.
double allreduce_time(double bytes, int tp, const HardwareSpec& hw);

/// Synchronous-pipeline idle fraction (pp-1)/(microbatches+pp-1).
double pp_bubble_fraction(int pp, std::int64_t microbatches);

}  // namespace infersim
