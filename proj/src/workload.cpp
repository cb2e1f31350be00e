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
#include "infersim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace infersim {

double HistogramSpec::mean() const {
  double m = 0;
  for (const auto& b : buckets)
    m += b.probability * 0.5 * static_cast<double>(b.lo + b.hi);
  return m;
}

void validate(const HistogramSpec& hist) {
  if (hist.buckets.empty())
    throw std::invalid_argument("histogram needs at least one bucket");
  double total = 0;
  std::int64_t prev_hi = -1;
  for (const auto& b : hist.buckets) {
    if (b.lo < 0 || b.hi < b.lo)
      throw std::invalid_argument("histogram bucket [" +
                                  std::to_string(b.lo) + ", " +
                                  std::to_string(b.hi) + "] is malformed");
    if (b.lo <= prev_hi)
      throw std::invalid_argument(
          "histogram buckets must be ordered and disjoint");
    if (b.probability < 0)
      throw std::invalid_argument("bucket probability must be >= 0");
    prev_hi = b.hi;
    total += b.probability;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("bucket probabilities sum to " +
                                std::to_string(total) + ", expected 1");
}

void validate(const WorkloadSpec& spec) {
  if (spec.num_requests < 1)
    throw std::invalid_argument("num_requests must be >= 1");
  validate(spec.isl_hist);
  validate(spec.osl_hist);
  if (spec.arrival.kind == ArrivalKind::kPoisson && spec.arrival.poisson_rate <= 0)
    throw std::invalid_argument("poisson arrival rate must be positive");
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; avoids the
// implementation-defined std distributions so seeds pin exact workloads.
double next_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::int64_t sample_hist(const HistogramSpec& hist, std::mt19937_64& rng) {
  const double u = next_u01(rng);
  double cum = 0;
  const HistogramBucket* chosen = &hist.buckets.back();
  for (const auto& b : hist.buckets) {
    cum += b.probability;
    if (u < cum) {
      chosen = &b;
      break;
    }
  }
  const double v = next_u01(rng);
  const std::int64_t width = chosen->hi - chosen->lo + 1;
  const std::int64_t offset =
      static_cast<std::int64_t>(v * static_cast<double>(width));
  return chosen->lo + std::min(offset, width - 1);
}

}  // namespace

std::vector<Request> sample_workload(const WorkloadSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::vector<Request> requests;
  requests.reserve(static_cast<std::size_t>(spec.num_requests));
  double clock = 0;
  for (std::int64_t i = 0; i < spec.num_requests; ++i) {
    Request r;
    r.id = i;
    r.isl = sample_hist(spec.isl_hist, rng);
    r.osl = sample_hist(spec.osl_hist, rng);
    if (spec.arrival.kind == ArrivalKind::kPoisson) {
      clock += -std::log(1.0 - next_u01(rng)) / spec.arrival.poisson_rate;
      r.arrival_time = clock;
    }
    r.prefill_target = r.isl;
    r.last_transition = r.arrival_time;
    requests.push_back(r);
  }
  return requests;
}

WorkloadStats workload_stats(const std::vector<Request>& requests,
                             const WorkloadSpec& spec) {
  if (requests.empty())
    throw std::invalid_argument("workload_stats needs a non-empty list");
  WorkloadStats stats;
  stats.num_requests = static_cast<std::int64_t>(requests.size());

  std::vector<std::int64_t> isl, osl;
  isl.reserve(requests.size());
  osl.reserve(requests.size());
  double isl_sum = 0, osl_sum = 0;
  for (const auto& r : requests) {
    isl.push_back(r.isl);
    osl.push_back(r.osl);
    isl_sum += static_cast<double>(r.isl);
    osl_sum += static_cast<double>(r.osl);
  }
  std::sort(isl.begin(), isl.end());
  std::sort(osl.begin(), osl.end());
  stats.mean_isl = isl_sum / static_cast<double>(requests.size());
  stats.mean_osl = osl_sum / static_cast<double>(requests.size());
  stats.median_isl = isl[(isl.size() - 1) / 2];
  stats.median_osl = osl[(osl.size() - 1) / 2];

  auto fractions = [&](const HistogramSpec& hist,
                       auto field) -> std::vector<double> {
    std::vector<double> f(hist.buckets.size(), 0.0);
    for (const auto& r : requests) {
      const std::int64_t v = field(r);
      for (std::size_t b = 0; b < hist.buckets.size(); ++b) {
        if (v >= hist.buckets[b].lo && v <= hist.buckets[b].hi) {
          f[b] += 1.0;
          break;
        }
      }
    }
    for (auto& x : f) x /= static_cast<double>(requests.size());
    return f;
  };
  stats.isl_bucket_fractions =
      fractions(spec.isl_hist, [](const Request& r) { return r.isl; });
  stats.osl_bucket_fractions =
      fractions(spec.osl_hist, [](const Request& r) { return r.osl; });
  return stats;
}

const WorkloadPresets::Entry& WorkloadPresets::at(
    const std::string& name) const {
  auto it = entries.find(name);
  if (it == entries.end())
    throw std::runtime_error("unknown workload preset '" + name + "'");
  return it->second;
}

namespace {

HistogramSpec parse_hist(const nlohmann::json& j) {
  HistogramSpec hist;
  for (const auto& b : j.at("buckets")) {
    HistogramBucket bucket;
    bucket.lo = b.at(0).get<std::int64_t>();
    bucket.hi = b.at(1).get<std::int64_t>();
    bucket.probability = b.at(2).get<double>();
    hist.buckets.push_back(bucket);
  }
  validate(hist);
  return hist;
}

}  // namespace

WorkloadPresets load_workload_presets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open workload presets: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  WorkloadPresets presets;
  if (doc.is_null()) return presets;
  for (const auto& [name, j] : doc.items()) {
    WorkloadPresets::Entry entry;
    entry.isl_hist = parse_hist(j.at("isl_hist"));
    entry.osl_hist = parse_hist(j.at("osl_hist"));
    presets.entries.emplace(name, entry);
  }
  return presets;
}

std::string workload_to_csv(const std::vector<Request>& requests) {
  std::ostringstream out;
  out << "id,arrival,isl,osl\n";
  char buf[64];
  for (const auto& r : requests) {
    std::snprintf(buf, sizeof(buf), "%.9g", r.arrival_time);
    out << r.id << ',' << buf << ',' << r.isl << ',' << r.osl << '\n';
  }
  return out.str();
}

}  // namespace infersim
