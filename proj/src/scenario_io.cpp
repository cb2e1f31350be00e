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
#include "infersim/scenario_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace infersim {

namespace {

using json = nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

HistogramSpec parse_hist_inline(const json& j) {
  HistogramSpec hist;
  for (const auto& b : j.at("buckets")) {
    hist.buckets.push_back(HistogramBucket{b.at(0).get<std::int64_t>(),
                                           b.at(1).get<std::int64_t>(),
                                           b.at(2).get<double>()});
  }
  validate(hist);
  return hist;
}

ArrivalSpec parse_arrival(const json& j) {
  ArrivalSpec arrival;
  if (j.is_string()) {
    if (j.get<std::string>() != "batch")
      throw std::runtime_error("arrival must be \"batch\" or {\"poisson\":...}");
    arrival.kind = ArrivalKind::kBatch;
  } else if (j.is_object() && j.contains("poisson")) {
    arrival.kind = ArrivalKind::kPoisson;
    arrival.poisson_rate = j.at("poisson").at("rate").get<double>();
  } else {
    throw std::runtime_error("arrival must be \"batch\" or {\"poisson\":...}");
  }
  return arrival;
}

WorkloadSpec parse_workload(const json& j, const PresetBundle& presets) {
  WorkloadSpec spec;
  if (j.contains("preset")) {
    const auto& entry = presets.workloads.at(j.at("preset").get<std::string>());
    spec.isl_hist = entry.isl_hist;
    spec.osl_hist = entry.osl_hist;
  }
  if (j.contains("isl_hist")) spec.isl_hist = parse_hist_inline(j.at("isl_hist"));
  if (j.contains("osl_hist")) spec.osl_hist = parse_hist_inline(j.at("osl_hist"));
  spec.num_requests = j.at("num_requests").get<std::int64_t>();
  if (j.contains("arrival")) spec.arrival = parse_arrival(j.at("arrival"));
  spec.seed = j.value("seed", 0ULL);
  validate(spec);
  return spec;
}

SchedulerConfig parse_scheduler(const json& j) {
  SchedulerConfig cfg;
  cfg.max_num_seqs = j.value("max_num_seqs", cfg.max_num_seqs);
  cfg.max_num_batched_tokens =
      j.value("max_num_batched_tokens", cfg.max_num_batched_tokens);
  cfg.block_size = j.value("block_size", cfg.block_size);
  cfg.gpu_memory_utilization =
      j.value("gpu_memory_utilization", cfg.gpu_memory_utilization);
  cfg.prefix_hit_fraction =
      j.value("prefix_hit_fraction", cfg.prefix_hit_fraction);
  cfg.swap_host_bandwidth =
      j.value("swap_host_bandwidth", cfg.swap_host_bandwidth);
  if (j.contains("preemption_policy")) {
    const auto policy = j.at("preemption_policy").get<std::string>();
    if (policy == "recompute")
      cfg.preemption_policy = PreemptionPolicy::kRecompute;
    else if (policy == "swap")
      cfg.preemption_policy = PreemptionPolicy::kSwap;
    else
      throw std::runtime_error("preemption_policy must be recompute or swap");
  }
  validate(cfg);
  return cfg;
}

}  // namespace

PresetBundle load_presets(const std::filesystem::path& dir) {
  PresetBundle bundle;
  bundle.models = load_catalog(dir / "models.json");
  bundle.hardware = load_hardware(dir / "hardware.json");
  bundle.workloads = load_workload_presets(dir / "workloads.json");
  return bundle;
}

Scenario load_scenario(const std::filesystem::path& path,
                       const PresetBundle& presets) {
  const json doc = parse_file(path);
  Scenario scenario;
  scenario.name = doc.value("name", path.stem().string());
  scenario.model = presets.models.at(doc.at("model").get<std::string>());
  scenario.hardware =
      presets.hardware.at(doc.at("hardware").get<std::string>());
  if (doc.contains("parallelism")) {
    const auto& p = doc.at("parallelism");
    scenario.parallelism.dp = p.value("dp", 1);
    scenario.parallelism.tp = p.value("tp", 1);
    scenario.parallelism.pp = p.value("pp", 1);
  }
  scenario.scheduler = doc.contains("scheduler")
                           ? parse_scheduler(doc.at("scheduler"))
                           : SchedulerConfig{};
  scenario.workload = parse_workload(doc.at("workload"), presets);
  scenario.telemetry_sample_interval =
      doc.value("telemetry_sample_interval", scenario.telemetry_sample_interval);
  validate(scenario);
  return scenario;
}

WorkloadSpec load_workload_spec(const std::filesystem::path& path,
                                const PresetBundle& presets) {
  return parse_workload(parse_file(path), presets);
}

}  // namespace infersim
