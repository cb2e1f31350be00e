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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "infersim/request.hpp"

namespace infersim {

/// Inclusive integer token range with its probability mass.
struct HistogramBucket {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double probability = 0;
};

struct HistogramSpec {
  std::vector<HistogramBucket> buckets;

  double mean() const;
};

/// Throws std::invalid_argument unless buckets are ordered, disjoint,
/// non-empty ranges with probabilities summing to 1 within 1e-9.
void validate(const HistogramSpec& hist);

enum class ArrivalKind { kBatch, kPoisson };

struct ArrivalSpec {
  ArrivalKind kind = ArrivalKind::kBatch;
  double poisson_rate = 0;  // requests/s when kind == kPoisson
};

struct WorkloadSpec {
  std::int64_t num_requests = 1;
  HistogramSpec isl_hist;
  HistogramSpec osl_hist;
  ArrivalSpec arrival;
  std::uint64_t seed = 0;
};

void validate(const WorkloadSpec& spec);

/// Samples a request population: bucket selection then uniform draw within
/// the bucket, with a fixed draw order so a seed pins the workload exactly.
std::vector<Request> sample_workload(const WorkloadSpec& spec);

struct WorkloadStats {
  std::int64_t num_requests = 0;
  double mean_isl = 0;
  double mean_osl = 0;
  std::int64_t median_isl = 0;
  std::int64_t median_osl = 0;
  // Empirical mass per spec bucket, same order as the histogram.
  std::vector<double> isl_bucket_fractions;
  std::vector<double> osl_bucket_fractions;
};

/// Exact empirical fractions of `requests` against the spec's buckets.
/// Throws std::invalid_argument on an empty list.
WorkloadStats workload_stats(const std::vector<Request>& requests,
                             const WorkloadSpec& spec);

/// Named ISL/OSL histogram pairs (the bundled reasoning profile lives here).
struct WorkloadPresets {
  struct Entry {
    HistogramSpec isl_hist;
    HistogramSpec osl_hist;
  };
  std::map<std::string, Entry> entries;

  const Entry& at(const std::string& name) const;
};

WorkloadPresets load_workload_presets(const std::filesystem::path& path);

/// CSV export: header "id,arrival,isl,osl", one row per request.
std::string workload_to_csv(const std::vector<Request>& requests);

}  // namespace infersim
