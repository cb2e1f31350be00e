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
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "run_stats.hpp"

namespace infersim {

namespace internal {

void StepAccounting::note_step(std::int64_t prefill_tokens,
                               std::int64_t decode_tokens,
                               bool decode_alloc_failed,
                               bool prefill_alloc_failed,
                               const StepTiming& timing,
                               double charged_seconds, double clock_end) {
  total_steps += 1;
  total_step_seconds += charged_seconds;
  if (decode_tokens > 0) decode_step_seconds += charged_seconds;
  if (prefill_tokens > 0 && decode_tokens == 0) {
    prefill_only_steps += 1;
    prefill_sm_sum += timing.modeled_sm_util;
    prefill_bw_sum += timing.modeled_bw_util;
  }
  if (decode_tokens > 0 && prefill_tokens == 0) {
    decode_only_steps += 1;
    decode_sm_sum += timing.modeled_sm_util;
    decode_bw_sum += timing.modeled_bw_util;
  }
  if (first_saturation_phase.empty() &&
      (decode_alloc_failed || prefill_alloc_failed)) {
    first_saturation_phase = decode_alloc_failed ? "decode" : "prefill";
    first_saturation_time = clock_end;
  }
}

void StepAccounting::merge(const StepAccounting& other) {
  total_steps += other.total_steps;
  total_step_seconds += other.total_step_seconds;
  decode_step_seconds += other.decode_step_seconds;
  prefill_sm_sum += other.prefill_sm_sum;
  prefill_bw_sum += other.prefill_bw_sum;
  prefill_only_steps += other.prefill_only_steps;
  decode_sm_sum += other.decode_sm_sum;
  decode_bw_sum += other.decode_bw_sum;
  decode_only_steps += other.decode_only_steps;
  peak_kv_utilization = std::max(peak_kv_utilization, other.peak_kv_utilization);
  total_preemptions += other.total_preemptions;
  if (other.first_saturation_time < first_saturation_time) {
    first_saturation_time = other.first_saturation_time;
    first_saturation_phase = other.first_saturation_phase;
  }
}

namespace {

// Nearest-rank percentile over a sorted copy.
double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<std::int64_t>(values.size());
  std::int64_t idx =
      static_cast<std::int64_t>(std::ceil(q * static_cast<double>(n))) - 1;
  idx = std::clamp<std::int64_t>(idx, 0, n - 1);
  return values[static_cast<std::size_t>(idx)];
}

LatencyStats stats_of(const std::vector<double>& values) {
  LatencyStats s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.p50 = percentile(values, 0.50);
  s.p99 = percentile(values, 0.99);
  return s;
}

}  // namespace

RunSummary summarize(const std::vector<Request>& requests,
                     const StepAccounting& acc) {
  RunSummary summary;
  std::vector<double> ttft, tpot, e2e, wait, run;
  double min_arrival = std::numeric_limits<double>::infinity();
  double max_finish = 0;
  double total_tokens = 0;

  for (const auto& r : requests) {
    if (!r.finish_time || !r.first_token_time)
      throw std::logic_error("summary over an unfinished request");
    RequestRecord rec;
    rec.id = r.id;
    rec.replica = r.replica;
    rec.isl = r.isl;
    rec.osl = r.osl;
    rec.ttft = *r.first_token_time - r.arrival_time;
    rec.e2e = *r.finish_time - r.arrival_time;
    rec.tpot_mean = r.osl > 1 ? (rec.e2e - rec.ttft) /
                                    static_cast<double>(r.osl - 1)
                              : 0.0;
    rec.wait_seconds = r.wait_seconds;
    rec.run_seconds = r.run_seconds;
    rec.preemption_count = r.preemption_count;
    summary.per_request.push_back(rec);

    ttft.push_back(rec.ttft);
    tpot.push_back(rec.tpot_mean);
    e2e.push_back(rec.e2e);
    wait.push_back(rec.wait_seconds);
    run.push_back(rec.run_seconds);
    min_arrival = std::min(min_arrival, r.arrival_time);
    max_finish = std::max(max_finish, *r.finish_time);
    total_tokens += static_cast<double>(r.osl);
  }

  summary.ttft = stats_of(ttft);
  summary.tpot = stats_of(tpot);
  summary.e2e = stats_of(e2e);
  summary.wait = stats_of(wait);
  summary.run = stats_of(run);
  summary.makespan_seconds = max_finish - min_arrival;
  summary.tokens_per_second = summary.makespan_seconds > 0
                                  ? total_tokens / summary.makespan_seconds
                                  : 0.0;
  summary.total_preemptions = acc.total_preemptions;
  summary.peak_kv_utilization = acc.peak_kv_utilization;
  summary.total_steps = acc.total_steps;
  summary.decode_wall_fraction =
      acc.total_step_seconds > 0
          ? acc.decode_step_seconds / acc.total_step_seconds
          : 0.0;
  summary.prefill_sm_util_mean =
      acc.prefill_only_steps > 0
          ? acc.prefill_sm_sum / static_cast<double>(acc.prefill_only_steps)
          : 0.0;
  summary.prefill_bw_util_mean =
      acc.prefill_only_steps > 0
          ? acc.prefill_bw_sum / static_cast<double>(acc.prefill_only_steps)
          : 0.0;
  summary.decode_sm_util_mean =
      acc.decode_only_steps > 0
          ? acc.decode_sm_sum / static_cast<double>(acc.decode_only_steps)
          : 0.0;
  summary.decode_bw_util_mean =
      acc.decode_only_steps > 0
          ? acc.decode_bw_sum / static_cast<double>(acc.decode_only_steps)
          : 0.0;
  summary.first_saturation_phase = acc.first_saturation_phase;
  return summary;
}

}  // namespace internal

bool operator==(const RequestRecord& a, const RequestRecord& b) {
  return a.id == b.id && a.replica == b.replica && a.isl == b.isl &&
         a.osl == b.osl && a.ttft == b.ttft && a.tpot_mean == b.tpot_mean &&
         a.e2e == b.e2e && a.wait_seconds == b.wait_seconds &&
         a.run_seconds == b.run_seconds &&
         a.preemption_count == b.preemption_count;
}

bool operator==(const LatencyStats& a, const LatencyStats& b) {
  return a.mean == b.mean && a.p50 == b.p50 && a.p99 == b.p99;
}

bool operator==(const RunSummary& a, const RunSummary& b) {
  return a.per_request == b.per_request && a.ttft == b.ttft &&
         a.tpot == b.tpot && a.e2e == b.e2e && a.wait == b.wait &&
         a.run == b.run && a.makespan_seconds == b.makespan_seconds &&
         a.tokens_per_second == b.tokens_per_second &&
         a.total_preemptions == b.total_preemptions &&
         a.peak_kv_utilization == b.peak_kv_utilization &&
         a.total_steps == b.total_steps &&
         a.decode_wall_fraction == b.decode_wall_fraction &&
         a.first_saturation_phase == b.first_saturation_phase;
}

bool Telemetry::empty() const {
  for (const auto& series : replicas)
    if (!series.empty()) return false;
  return true;
}

std::vector<std::vector<TelemetrySample>> Telemetry::merged(
    std::int64_t points) const {
  if (points < 2) throw std::invalid_argument("merged needs >= 2 points");
  double t_end = 0;
  for (const auto& series : replicas)
    if (!series.empty()) t_end = std::max(t_end, series.back().sim_time);

  std::vector<std::vector<TelemetrySample>> grid(replicas.size());
  for (std::size_t r = 0; r < replicas.size(); ++r) {
    const auto& series = replicas[r];
    if (series.empty()) continue;
    std::size_t cursor = 0;
    for (std::int64_t p = 0; p < points; ++p) {
      const double t = t_end * static_cast<double>(p) /
                       static_cast<double>(points - 1);
      while (cursor + 1 < series.size() &&
             series[cursor + 1].sim_time <= t)
        ++cursor;
      TelemetrySample s;
      if (cursor + 1 >= series.size() || t <= series.front().sim_time) {
        s = t <= series.front().sim_time ? series.front() : series.back();
      } else {
        const auto& a = series[cursor];
        const auto& b = series[cursor + 1];
        const double w =
            (t - a.sim_time) / (b.sim_time - a.sim_time);
        auto lerp = [&](double x, double y) { return x + w * (y - x); };
        s.running = static_cast<std::int64_t>(
            std::llround(lerp(static_cast<double>(a.running),
                              static_cast<double>(b.running))));
        s.waiting = static_cast<std::int64_t>(
            std::llround(lerp(static_cast<double>(a.waiting),
                              static_cast<double>(b.waiting))));
        s.preempted_cum = b.preempted_cum;
        s.kv_utilization = lerp(a.kv_utilization, b.kv_utilization);
        s.tokens_per_s = lerp(a.tokens_per_s, b.tokens_per_s);
        s.modeled_bw_util = lerp(a.modeled_bw_util, b.modeled_bw_util);
        s.modeled_sm_util = lerp(a.modeled_sm_util, b.modeled_sm_util);
      }
      s.sim_time = t;
      grid[r].push_back(s);
    }
  }
  return grid;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string telemetry_to_csv(const Telemetry& telemetry) {
  std::ostringstream out;
  out << "sim_time,replica,running,waiting,preempted_cum,kv_util,"
         "tokens_per_s,bw_util,sm_util\n";
  for (std::size_t r = 0; r < telemetry.replicas.size(); ++r) {
    for (const auto& s : telemetry.replicas[r]) {
      out << fmt_double(s.sim_time) << ',' << r << ',' << s.running << ','
          << s.waiting << ',' << s.preempted_cum << ','
          << fmt_double(s.kv_utilization) << ',' << fmt_double(s.tokens_per_s)
          << ',' << fmt_double(s.modeled_bw_util) << ','
          << fmt_double(s.modeled_sm_util) << '\n';
    }
  }
  return out.str();
}

std::string summary_to_json(const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["makespan_seconds"] = summary.makespan_seconds;
  j["tokens_per_second"] = summary.tokens_per_second;
  j["total_preemptions"] = summary.total_preemptions;
  j["peak_kv_utilization"] = summary.peak_kv_utilization;
  j["total_steps"] = summary.total_steps;
  j["decode_wall_fraction"] = summary.decode_wall_fraction;
  j["prefill_sm_util_mean"] = summary.prefill_sm_util_mean;
  j["prefill_bw_util_mean"] = summary.prefill_bw_util_mean;
  j["decode_sm_util_mean"] = summary.decode_sm_util_mean;
  j["decode_bw_util_mean"] = summary.decode_bw_util_mean;
  j["first_saturation_phase"] = summary.first_saturation_phase;
  auto stats = [](const LatencyStats& s) {
    nlohmann::ordered_json out;
    out["mean"] = s.mean;
    out["p50"] = s.p50;
    out["p99"] = s.p99;
    return out;
  };
  j["ttft"] = stats(summary.ttft);
  j["tpot"] = stats(summary.tpot);
  j["e2e"] = stats(summary.e2e);
  j["wait"] = stats(summary.wait);
  j["run"] = stats(summary.run);
  auto& per_request = j["per_request"] = nlohmann::ordered_json::array();
  for (const auto& r : summary.per_request) {
    nlohmann::ordered_json jr;
    jr["id"] = r.id;
    jr["replica"] = r.replica;
    jr["isl"] = r.isl;
    jr["osl"] = r.osl;
    jr["ttft"] = r.ttft;
    jr["tpot_mean"] = r.tpot_mean;
    jr["e2e"] = r.e2e;
    jr["wait_seconds"] = r.wait_seconds;
    jr["run_seconds"] = r.run_seconds;
    jr["preemption_count"] = r.preemption_count;
    per_request.push_back(jr);
  }
  return j.dump(2);
}

}  // namespace infersim
