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

#include <filesystem>
#include <map>
#include <string>

namespace infersim {

/// Per-GPU capacity/bandwidth/FLOPS plus interconnect and efficiency knobs.
/// Efficiencies are calibration factors, not measurements.
struct HardwareSpec {
  std::string name;
  int num_gpus = 1;
  double hbm_capacity = 0;       // bytes per GPU
  double hbm_bandwidth = 0;      // bytes/s per GPU
  double peak_flops = 0;         // flops/s per GPU
  double link_bandwidth = 0;     // bytes/s per GPU
  double link_latency = 0;       // seconds per ring hop
  double mem_efficiency = 0.8;   // fraction of peak HBM bandwidth achieved
  double compute_efficiency = 0.5;  // fraction of peak FLOPS achieved
  double moe_route_latency = 20e-6;  // seconds per MoE layer per decode step
  double step_launch_overhead = 50e-6;  // fixed per-step scheduling cost
  double activation_reserve_fraction = 0.05;  // HBM share held for activations
};

void validate(const HardwareSpec& hw);

struct HardwareCatalog {
  std::map<std::string, HardwareSpec> entries;

  const HardwareSpec& at(const std::string& name) const;
  bool contains(const std::string& name) const {
    return entries.count(name) > 0;
  }
};

HardwareCatalog load_hardware(const std::filesystem::path& path);

}  // namespace infersim
