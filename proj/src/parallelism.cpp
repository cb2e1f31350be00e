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
#include "infersim/parallelism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace infersim {

std::string ParallelismConfig::to_string() const {
  std::ostringstream out;
  out << "dp" << dp << "-tp" << tp << "-pp" << pp;
  return out.str();
}

bool operator==(const ParallelismConfig& a, const ParallelismConfig& b) {
  return a.dp == b.dp && a.tp == b.tp && a.pp == b.pp;
}

bool operator<(const ParallelismConfig& a, const ParallelismConfig& b) {
  return std::tie(a.dp, a.tp, a.pp) < std::tie(b.dp, b.tp, b.pp);
}

ParallelismConfig parse_parallelism(const std::string& text) {
  ParallelismConfig cfg;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> cfg.dp >> x1 >> cfg.tp >> x2 >> cfg.pp) || x1 != 'x' ||
      x2 != 'x' || cfg.dp < 1 || cfg.tp < 1 || cfg.pp < 1)
    throw std::invalid_argument("cannot parse parallelism '" + text +
                                "', expected e.g. 4x2x1");
  return cfg;
}

std::vector<ParallelismConfig> enumerate_configs(int num_gpus) {
  if (num_gpus < 1)
    throw std::invalid_argument("num_gpus must be >= 1");
  std::vector<ParallelismConfig> configs;
  for (int dp = 1; dp <= num_gpus; ++dp) {
    if (num_gpus % dp != 0) continue;
    const int rest = num_gpus / dp;
    for (int tp = 1; tp <= rest; ++tp) {
      if (rest % tp != 0) continue;
      configs.push_back(ParallelismConfig{dp, tp, rest / tp});
    }
  }
  std::sort(configs.begin(), configs.end());
  return configs;
}

PlacementReport placement(const ModelSpec& model, const HardwareSpec& hw,
                          const ParallelismConfig& cfg,
                          const SchedulerConfig& sched) {
  PlacementReport report;
  const int shards = cfg.shards_per_replica();
  report.weight_bytes_per_gpu =
      static_cast<double>(weight_bytes(model)) / shards;

  const double budget = hw.hbm_capacity * sched.gpu_memory_utilization;
  report.kv_headroom_per_gpu =
      std::max(0.0, budget - report.weight_bytes_per_gpu);

  const double replica_headroom = report.kv_headroom_per_gpu * shards;
  report.kv_pool_tokens_per_replica = static_cast<std::int64_t>(std::floor(
      replica_headroom / static_cast<double>(kv_bytes_per_token(model))));

  const double reserve = hw.activation_reserve_fraction * hw.hbm_capacity;
  if (report.weight_bytes_per_gpu + reserve >= budget) {
    report.feasible = false;
    std::ostringstream why;
    why.setf(std::ios::fixed);
    why.precision(1);
    why << "weights need " << report.weight_bytes_per_gpu / 1e9
        << " GB/GPU plus " << reserve / 1e9 << " GB activation reserve, but "
        << "only " << budget / 1e9 << " GB of HBM is usable at utilization "
        << sched.gpu_memory_utilization;
    report.infeasibility_reason = why.str();
  } else {
    report.feasible = true;
  }
  return report;
}

double allreduce_time(double bytes, int tp, const HardwareSpec& hw) {
  if (tp < 1) throw std::invalid_argument("tp must be >= 1");
  if (bytes < 0) throw std::invalid_argument("bytes must be >= 0");
  if (tp == 1) return 0.0;
  const double hops = 2.0 * (tp - 1);
  return hops / tp * bytes / hw.link_bandwidth + hops * hw.link_latency;
}

double pp_bubble_fraction(int pp, std::int64_t microbatches) {
  if (pp < 1) throw std::invalid_argument("pp must be >= 1");
  if (microbatches < 1)
    throw std::invalid_argument("microbatches must be >= 1");
  if (pp == 1) return 0.0;
  return static_cast<double>(pp - 1) /
         static_cast<double>(microbatches + pp - 1);
}

}  // namespace infersim
