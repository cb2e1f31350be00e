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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infersim/engine.hpp"
#include "infersim/planner.hpp"
#include "infersim/scenario_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace infersim;

namespace {

fs::path preset_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("INFERSIM_PRESETS")) return env;
#ifdef INFERSIM_DEFAULT_PRESET_DIR
  return INFERSIM_DEFAULT_PRESET_DIR;
#else
  return "presets";
#endif
}

fs::path output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("INFERSIM_OUTPUT_DIR")) return env;
  return "infersim-out";
}

void write_text(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

std::vector<std::string> split_values(const std::string& csv) {
  std::vector<std::string> values;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) values.push_back(item);
  }
  if (values.empty())
    throw std::runtime_error("--values needs a comma-separated list");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete-event simulator and capacity planner for "
               "reasoning-centric LLM serving"};
  app.require_subcommand(1);

  std::string presets_flag, out_flag;
  app.add_option("--presets", presets_flag,
                 "preset directory (default: $INFERSIM_PRESETS or bundled)");
  app.add_option("-o,--output", out_flag,
                 "output directory (default: $INFERSIM_OUTPUT_DIR)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run one scenario file");
  std::string sim_scenario;
  sim_cmd->add_option("scenario", sim_scenario, "scenario JSON file")
      ->required();

  // sweep
  auto* sweep_cmd =
      app.add_subcommand("sweep", "run a scenario across one swept axis");
  std::string sweep_scenario, sweep_axis, sweep_values;
  sweep_cmd->add_option("scenario", sweep_scenario, "scenario JSON file")
      ->required();
  sweep_cmd
      ->add_option("--axis", sweep_axis,
                   "max_num_seqs | num_requests | parallelism | model")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
      ->required();

  // plan
  auto* plan_cmd = app.add_subcommand(
      "plan", "rank every parallelism layout for a model on a GPU budget");
  std::string plan_model, plan_hw, plan_workload;
  int plan_gpus = 8;
  std::int64_t plan_requests = 1024;
  std::uint64_t plan_seed = 0;
  SchedulerConfig plan_sched;
  plan_sched.max_num_seqs = 64;
  plan_cmd->add_option("--model", plan_model, "model preset name")->required();
  plan_cmd->add_option("--hardware", plan_hw, "hardware preset name")
      ->required();
  plan_cmd->add_option("--gpus", plan_gpus, "GPU budget")->required();
  plan_cmd->add_option("--workload", plan_workload, "workload preset name")
      ->required();
  plan_cmd->add_option("--requests", plan_requests,
                       "workload size for the estimate");
  plan_cmd->add_option("--seed", plan_seed, "workload sampling seed");
  plan_cmd->add_option("--max-num-seqs", plan_sched.max_num_seqs,
                       "per-replica concurrency cap");
  plan_cmd->add_option("--max-num-batched-tokens",
                       plan_sched.max_num_batched_tokens,
                       "per-step token budget");

  // workload gen
  auto* workload_cmd = app.add_subcommand("workload", "workload utilities");
  auto* gen_cmd =
      workload_cmd->add_subcommand("gen", "sample a workload spec to CSV");
  std::string gen_spec, gen_out;
  gen_cmd->add_option("spec", gen_spec, "workload spec JSON file")->required();
  gen_cmd->add_option("-o,--output", gen_out, "CSV output path")->required();

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "dry-run feasibility of a scenario");
  std::string validate_scenario;
  validate_cmd->add_option("scenario", validate_scenario, "scenario JSON file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const PresetBundle presets = load_presets(preset_dir(presets_flag));

    if (sim_cmd->parsed()) {
      const Scenario scenario = load_scenario(sim_scenario, presets);
      auto [telemetry, summary] = run(scenario);
      const fs::path dir = output_dir(out_flag) / scenario.name;
      write_text(dir / "summary.json", summary_to_json(summary));
      write_text(dir / "telemetry.csv", telemetry_to_csv(telemetry));
      std::cout << "scenario " << scenario.name << ": makespan "
                << summary.makespan_seconds << " s, " << summary.tokens_per_second
                << " tokens/s, " << summary.total_preemptions
                << " preemptions\nwrote " << (dir / "summary.json").string()
                << "\n";
    } else if (sweep_cmd->parsed()) {
      const Scenario scenario = load_scenario(sweep_scenario, presets);
      const auto values = split_values(sweep_values);
      const auto results = sweep(scenario, sweep_axis, values, &presets.models);
      const fs::path dir =
          output_dir(out_flag) / (scenario.name + "-" + sweep_axis);
      write_report(results, sweep_axis, dir);
      std::cout << "axis " << sweep_axis << ":\n";
      for (const auto& r : results)
        std::cout << "  " << r.value << ": makespan "
                  << r.summary.makespan_seconds << " s, mean e2e "
                  << r.summary.e2e.mean << " s, preemptions "
                  << r.summary.total_preemptions << "\n";
      std::cout << "wrote " << dir.string() << "\n";
    } else if (plan_cmd->parsed()) {
      validate(plan_sched);
      const ModelSpec& model = presets.models.at(plan_model);
      const HardwareSpec& hw = presets.hardware.at(plan_hw);
      const auto& profile = presets.workloads.at(plan_workload);
      WorkloadSpec spec;
      spec.num_requests = plan_requests;
      spec.isl_hist = profile.isl_hist;
      spec.osl_hist = profile.osl_hist;
      spec.seed = plan_seed;
      const auto requests = sample_workload(spec);
      const auto stats = workload_stats(requests, spec);
      const auto entries = plan(model, hw, stats, plan_gpus, plan_sched);
      std::cout << plan_to_table(entries);
      const fs::path dir = output_dir(out_flag);
      write_text(dir / ("plan-" + plan_model + ".json"),
                 plan_to_json(entries));
      std::cout << "wrote " << (dir / ("plan-" + plan_model + ".json")).string()
                << "\n";
    } else if (gen_cmd->parsed()) {
      const WorkloadSpec spec = load_workload_spec(gen_spec, presets);
      const auto requests = sample_workload(spec);
      write_text(gen_out, workload_to_csv(requests));
      std::cout << "wrote " << gen_out << " (" << requests.size()
                << " requests)\n";
    } else if (validate_cmd->parsed()) {
      const Scenario scenario = load_scenario(validate_scenario, presets);
      const PlacementReport report =
          placement(scenario.model, scenario.hardware, scenario.parallelism,
                    scenario.scheduler);
      nlohmann::ordered_json j;
      j["scenario"] = scenario.name;
      j["feasible"] = report.feasible;
      j["weight_bytes_per_gpu"] = report.weight_bytes_per_gpu;
      j["kv_headroom_per_gpu"] = report.kv_headroom_per_gpu;
      j["kv_pool_tokens_per_replica"] = report.kv_pool_tokens_per_replica;
      if (!report.feasible) j["reason"] = report.infeasibility_reason;
      std::cout << j.dump(2) << "\n";
      if (!report.feasible) return 1;
    }
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
