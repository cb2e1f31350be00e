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
#include "infersim/hardware.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace infersim {

void validate(const HardwareSpec& hw) {
  auto positive = [&](double v, const char* field) {
    if (v <= 0)
      throw std::invalid_argument("hardware '" + hw.name + "': field '" +
                                  field + "' must be positive");
  };
  positive(hw.num_gpus, "num_gpus");
  positive(hw.hbm_capacity, "hbm_capacity");
  positive(hw.hbm_bandwidth, "hbm_bandwidth");
  positive(hw.peak_flops, "peak_flops");
  positive(hw.link_bandwidth, "link_bandwidth");
  if (hw.link_latency < 0)
    throw std::invalid_argument("hardware '" + hw.name +
                                "': field 'link_latency' must be >= 0");
  auto fraction = [&](double v, const char* field) {
    if (v <= 0 || v > 1)
      throw std::invalid_argument("hardware '" + hw.name + "': field '" +
                                  field + "' must be in (0, 1]");
  };
  fraction(hw.mem_efficiency, "mem_efficiency");
  fraction(hw.compute_efficiency, "compute_efficiency");
  if (hw.moe_route_latency < 0 || hw.step_launch_overhead < 0)
    throw std::invalid_argument("hardware '" + hw.name +
                                "': latency knobs must be >= 0");
  if (hw.activation_reserve_fraction < 0 ||
      hw.activation_reserve_fraction >= 1)
    throw std::invalid_argument(
        "hardware '" + hw.name +
        "': field 'activation_reserve_fraction' must be in [0, 1)");
}

const HardwareSpec& HardwareCatalog::at(const std::string& name) const {
  auto it = entries.find(name);
  if (it == entries.end())
    throw std::runtime_error("unknown hardware preset '" + name + "'");
  return it->second;
}

HardwareCatalog load_hardware(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open hardware file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  HardwareCatalog catalog;
  if (doc.is_null()) return catalog;
  for (const auto& [name, j] : doc.items()) {
    HardwareSpec hw;
    hw.name = name;
    hw.num_gpus = j.at("num_gpus").get<int>();
    hw.hbm_capacity = j.at("hbm_capacity").get<double>();
    hw.hbm_bandwidth = j.at("hbm_bandwidth").get<double>();
    hw.peak_flops = j.at("peak_flops").get<double>();
    hw.link_bandwidth = j.at("link_bandwidth").get<double>();
    hw.link_latency = j.value("link_latency", 0.0);
    hw.mem_efficiency = j.value("mem_efficiency", 0.8);
    hw.compute_efficiency = j.value("compute_efficiency", 0.5);
    hw.moe_route_latency = j.value("moe_route_latency", 20e-6);
    hw.step_launch_overhead = j.value("step_launch_overhead", 50e-6);
    hw.activation_reserve_fraction =
        j.value("activation_reserve_fraction", 0.05);
    validate(hw);
    catalog.entries.emplace(name, hw);
  }
  return catalog;
}

}  // namespace infersim
