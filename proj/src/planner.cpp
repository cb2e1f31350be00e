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
#include "infersim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace infersim {

namespace {

// Labels the dominant cost of the steady-state decode step.
std::string dominant_term(const StepTiming& decode, bool pool_limited) {
  if (pool_limited) return "capacity-bound";
  struct Named {
    double value;
    const char* label;
  };
  const Named terms[] = {
      {decode.memory_seconds, "bandwidth-bound"},
      {decode.compute_seconds, "compute-bound"},
      {decode.comm_seconds, "comm-bound"},
      {decode.bubble_seconds, "bubble-bound"},
  };
  const Named* best = &terms[0];
  for (const auto& t : terms)
    if (t.value > best->value) best = &t;
  return best->label;
}

}  // namespace

std::vector<PlanEntry> plan(const ModelSpec& model, const HardwareSpec& hw,
                            const WorkloadStats& workload, int num_gpus,
                            const SchedulerConfig& sched) {
  if (workload.num_requests < 1)
    throw std::invalid_argument("plan needs a non-empty workload summary");
  std::vector<PlanEntry> entries;

  for (const ParallelismConfig& cfg : enumerate_configs(num_gpus)) {
    const PlacementReport report = placement(model, hw, cfg, sched);
    PlanEntry entry;
    entry.config = cfg;
    entry.kv_pool_tokens = report.kv_pool_tokens_per_replica;
    entry.feasible = report.feasible;
    if (!report.feasible) {
      entry.rationale = report.infeasibility_reason;
      entries.push_back(entry);
      continue;
    }

    const double per_replica = std::ceil(
        static_cast<double>(workload.num_requests) / cfg.dp);
    const double mean_footprint = workload.mean_isl + workload.mean_osl;
    const double pool_cap =
        static_cast<double>(report.kv_pool_tokens_per_replica) /
        mean_footprint;
    double c = std::min({static_cast<double>(sched.max_num_seqs), pool_cap,
                         per_replica});
    c = std::max(1.0, std::floor(c));
    const bool pool_limited =
        pool_cap < static_cast<double>(sched.max_num_seqs) &&
        pool_cap < per_replica;

    // Resident KV at steady state: prompt plus half the output per stream.
    const auto kv_tokens = static_cast<std::int64_t>(
        c * (workload.mean_isl + workload.mean_osl / 2.0));
    const auto concurrency = static_cast<std::int64_t>(c);
    const StepTiming decode = replica_step_time(
        0, concurrency, kv_tokens, concurrency, model, hw, cfg);
    const double decode_time =
        per_replica * workload.mean_osl / c * decode.step_seconds;

    const std::int64_t budget = sched.max_num_batched_tokens;
    const StepTiming prefill =
        replica_step_time(budget, 0, 0, concurrency, model, hw, cfg);
    const double total_prefill = per_replica * workload.mean_isl;
    const double prefill_time =
        total_prefill / static_cast<double>(budget) * prefill.step_seconds;

    entry.est_makespan = prefill_time + decode_time;
    entry.est_tpot = decode.step_seconds;
    const StepTiming first_prefill = replica_step_time(
        std::max<std::int64_t>(
            1, static_cast<std::int64_t>(workload.mean_isl)),
        0, 0, concurrency, model, hw, cfg);
    const double waves = per_replica / c;
    entry.est_ttft = first_prefill.step_seconds +
                     std::max(0.0, waves - 1.0) / 2.0 * workload.mean_osl *
                         decode.step_seconds;
    entry.rationale = dominant_term(decode, pool_limited);
    entries.push_back(entry);
  }

  std::sort(entries.begin(), entries.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              if (a.feasible != b.feasible) return a.feasible;
              if (a.feasible && a.est_makespan != b.est_makespan)
                return a.est_makespan < b.est_makespan;
              return a.config < b.config;
            });
  return entries;
}

std::string plan_to_json(const std::vector<PlanEntry>& entries) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json je;
    je["dp"] = e.config.dp;
    je["tp"] = e.config.tp;
    je["pp"] = e.config.pp;
    je["feasible"] = e.feasible;
    je["kv_pool_tokens"] = e.kv_pool_tokens;
    if (e.feasible) {
      je["est_makespan_s"] = e.est_makespan;
      je["est_ttft_s"] = e.est_ttft;
      je["est_tpot_s"] = e.est_tpot;
    }
    je["rationale"] = e.rationale;
    j.push_back(je);
  }
  return j.dump(2);
}

std::string plan_to_table(const std::vector<PlanEntry>& entries) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "config" << std::setw(10) << "feasible"
      << std::setw(16) << "kv_pool_tokens" << std::setw(14) << "makespan_s"
      << std::setw(12) << "ttft_s" << std::setw(12) << "tpot_s"
      << "rationale\n";
  for (const auto& e : entries) {
    out << std::left << std::setw(12)
        << (std::to_string(e.config.dp) + "x" + std::to_string(e.config.tp) +
            "x" + std::to_string(e.config.pp))
        << std::setw(10) << (e.feasible ? "yes" : "no") << std::setw(16)
        << e.kv_pool_tokens;
    if (e.feasible) {
      out << std::setw(14) << std::fixed << std::setprecision(1)
          << e.est_makespan << std::setw(12) << std::setprecision(3)
          << e.est_ttft << std::setw(12) << std::setprecision(4)
          << e.est_tpot;
      out.unsetf(std::ios::fixed);
    } else {
      out << std::setw(14) << "-" << std::setw(12) << "-" << std::setw(12)
          << "-";
    }
    out << e.rationale << '\n';
  }
  return out.str();
}

KvProjection kv_projection(const ModelSpec& model, std::int64_t max_tokens,
                           int num_points) {
  if (max_tokens < 1)
    throw std::invalid_argument("max_tokens must be >= 1");
  if (num_points < 2)
    throw std::invalid_argument("kv_projection needs >= 2 points");
  const double bytes_per_token =
      static_cast<double>(kv_bytes_per_token(model));
  KvProjection projection;
  for (int i = 0; i < num_points; ++i) {
    KvProjection::Point p;
    p.tokens = static_cast<std::int64_t>(std::llround(
        static_cast<double>(max_tokens) * i / (num_points - 1)));
    p.bytes = static_cast<double>(p.tokens) * bytes_per_token;
    projection.points.push_back(p);
  }
  return projection;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json chart(const std::string& title, const std::string& x,
                   const std::string& y) {
  ordered_json j;
  j["title"] = title;
  j["x_label"] = x;
  j["y_label"] = y;
  return j;
}

ordered_json series_json(const std::string& name,
                         const std::vector<std::pair<double, double>>& pts) {
  ordered_json j;
  j["name"] = name;
  auto& points = j["points"] = ordered_json::array();
  for (const auto& [x, y] : pts) points.push_back({x, y});
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& body,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  written.push_back(path);
}

constexpr std::int64_t kGridPoints = 160;

}  // namespace

std::vector<std::filesystem::path> write_report(
    const std::vector<SweepResult>& results, const std::string& axis,
    const std::filesystem::path& out_dir) {
  if (results.empty())
    throw std::invalid_argument("report needs at least one run");
  for (const auto& r : results)
    if (r.telemetry.empty())
      throw std::invalid_argument("report needs non-empty telemetry (value " +
                                  r.value + ")");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  ordered_json throughput, kv_util, states, latency;
  throughput["chart"] =
      chart("generation throughput timeline", "sim_time_s", "tokens_per_s");
  kv_util["chart"] =
      chart("kv cache utilization timeline", "sim_time_s", "kv_util");
  states["chart"] =
      chart("request states timeline", "sim_time_s", "requests");
  latency["chart"] = chart("latency vs " + axis, axis, "seconds");
  auto& throughput_series = throughput["series"] = ordered_json::array();
  auto& kv_series = kv_util["series"] = ordered_json::array();
  auto& state_series = states["series"] = ordered_json::array();
  auto& latency_series = latency["series"] = ordered_json::array();

  std::vector<std::pair<double, double>> ttft_pts, tpot_pts, e2e_pts;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    write_file(out_dir / ("summary_" + r.value + ".json"),
               summary_to_json(r.summary), written);
    write_file(out_dir / ("telemetry_" + r.value + ".csv"),
               telemetry_to_csv(r.telemetry), written);

    const auto grid = r.telemetry.merged(kGridPoints);
    std::vector<std::pair<double, double>> tput, util, running, waiting,
        preempted;
    for (std::int64_t p = 0; p < kGridPoints; ++p) {
      double t = 0, tokens = 0, u = 0, run_count = 0, wait_count = 0,
             pre_count = 0;
      std::int64_t live = 0;
      for (const auto& series : grid) {
        if (series.empty()) continue;
        const auto& s = series[static_cast<std::size_t>(p)];
        t = s.sim_time;
        tokens += s.tokens_per_s;
        u += s.kv_utilization;
        run_count += static_cast<double>(s.running);
        wait_count += static_cast<double>(s.waiting);
        pre_count += static_cast<double>(s.preempted_cum);
        ++live;
      }
      if (live == 0) continue;
      tput.emplace_back(t, tokens);
      util.emplace_back(t, u / static_cast<double>(live));
      running.emplace_back(t, run_count);
      waiting.emplace_back(t, wait_count);
      preempted.emplace_back(t, pre_count);
    }
    throughput_series.push_back(series_json(r.value, tput));
    kv_series.push_back(series_json(r.value, util));
    state_series.push_back(series_json(r.value + "/running", running));
    state_series.push_back(series_json(r.value + "/waiting", waiting));
    state_series.push_back(series_json(r.value + "/preempted", preempted));

    double x = static_cast<double>(i);
    try {
      x = std::stod(r.value);
    } catch (const std::exception&) {
      // non-numeric axis values keep their input index
    }
    ttft_pts.emplace_back(x, r.summary.ttft.mean);
    tpot_pts.emplace_back(x, r.summary.tpot.mean);
    e2e_pts.emplace_back(x, r.summary.e2e.mean);
  }
  latency_series.push_back(series_json("ttft_mean", ttft_pts));
  latency_series.push_back(series_json("tpot_mean", tpot_pts));
  latency_series.push_back(series_json("e2e_mean", e2e_pts));

  write_file(out_dir / "plot_throughput_timeline.json", throughput.dump(2),
             written);
  write_file(out_dir / "plot_kv_util_timeline.json", kv_util.dump(2),
             written);
  write_file(out_dir / "plot_request_states.json", states.dump(2), written);
  write_file(out_dir / "plot_latency_vs_axis.json", latency.dump(2), written);
  return written;
}

}  // namespace infersim
