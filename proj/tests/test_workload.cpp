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
#include "doctest.h"
#include "infersim/workload.hpp"
#include "test_support.hpp"

using namespace infersim;

namespace {

WorkloadSpec reasoning_spec(std::int64_t n, std::uint64_t seed) {
  const auto& profile = testing::presets().workloads.at("natural-reasoning");
  WorkloadSpec spec;
  spec.num_requests = n;
  spec.isl_hist = profile.isl_hist;
  spec.osl_hist = profile.osl_hist;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_SUITE("workload-gen") {

TEST_CASE("same seed pins the workload exactly") {
  const auto spec = reasoning_spec(2000, 99);
  const auto a = sample_workload(spec);
  const auto b = sample_workload(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].isl == b[i].isl);
    CHECK(a[i].osl == b[i].osl);
    CHECK(a[i].arrival_time == b[i].arrival_time);
  }
  auto other = spec;
  other.seed = 100;
  const auto c = sample_workload(other);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    any_diff |= (a[i].isl != c[i].isl || a[i].osl != c[i].osl);
  CHECK(any_diff);
}

TEST_CASE("degenerate single-bucket histogram") {
  WorkloadSpec spec = testing::fixed_workload(5, 100, 7);
  const auto requests = sample_workload(spec);
  REQUIRE(requests.size() == 5);
  for (const auto& r : requests) {
    CHECK(r.isl == 100);
    CHECK(r.osl == 7);
    CHECK(r.arrival_time == 0.0);
    CHECK(r.prefill_target == 100);
  }
}

TEST_CASE("bucket frequencies converge to the spec probabilities") {
  const auto spec = reasoning_spec(20'000, 3);
  const auto requests = sample_workload(spec);
  const auto stats = workload_stats(requests, spec);
  REQUIRE(stats.isl_bucket_fractions.size() == spec.isl_hist.buckets.size());
  for (std::size_t b = 0; b < spec.isl_hist.buckets.size(); ++b)
    CHECK(stats.isl_bucket_fractions[b] ==
          doctest::Approx(spec.isl_hist.buckets[b].probability)
              .epsilon(0.15));
  for (std::size_t b = 0; b < spec.osl_hist.buckets.size(); ++b)
    CHECK(stats.osl_bucket_fractions[b] ==
          doctest::Approx(spec.osl_hist.buckets[b].probability)
              .epsilon(0.15));
  // all draws land inside some bucket
  double isl_mass = 0;
  for (double f : stats.isl_bucket_fractions) isl_mass += f;
  CHECK(isl_mass == doctest::Approx(1.0));
}

TEST_CASE("stats of a single request put full mass in its buckets") {
  WorkloadSpec spec = testing::fixed_workload(1, 100, 1000);
  const auto requests = sample_workload(spec);
  const auto stats = workload_stats(requests, spec);
  CHECK(stats.num_requests == 1);
  CHECK(stats.isl_bucket_fractions == std::vector<double>{1.0});
  CHECK(stats.mean_isl == 100.0);
  CHECK(stats.median_osl == 1000);
}

TEST_CASE("merged sub-populations mix linearly") {
  WorkloadSpec lo = testing::fixed_workload(30, 10, 50);
  WorkloadSpec hi = testing::fixed_workload(10, 200, 50);
  auto a = sample_workload(lo);
  const auto b = sample_workload(hi);
  a.insert(a.end(), b.begin(), b.end());

  WorkloadSpec merged_spec;
  merged_spec.num_requests = 40;
  merged_spec.isl_hist.buckets = {HistogramBucket{10, 10, 0.5},
                                  HistogramBucket{200, 200, 0.5}};
  merged_spec.osl_hist.buckets = {HistogramBucket{50, 50, 1.0}};
  const auto stats = workload_stats(a, merged_spec);
  CHECK(stats.isl_bucket_fractions[0] == doctest::Approx(0.75));
  CHECK(stats.isl_bucket_fractions[1] == doctest::Approx(0.25));
}

TEST_CASE("poisson arrivals are ordered and rate-consistent") {
  WorkloadSpec spec = testing::fixed_workload(4000, 10, 10);
  spec.arrival.kind = ArrivalKind::kPoisson;
  spec.arrival.poisson_rate = 50.0;
  const auto requests = sample_workload(spec);
  double prev = -1;
  for (const auto& r : requests) {
    CHECK(r.arrival_time > prev);
    prev = r.arrival_time;
  }
  const double horizon = requests.back().arrival_time;
  CHECK(4000.0 / horizon == doctest::Approx(50.0).epsilon(0.1));
}

TEST_CASE("histogram validation") {
  HistogramSpec bad;
  bad.buckets = {HistogramBucket{0, 10, 0.5}, HistogramBucket{5, 20, 0.5}};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.buckets = {HistogramBucket{0, 10, 0.7}};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.buckets = {HistogramBucket{10, 5, 1.0}};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK_THROWS_AS(workload_stats({}, testing::fixed_workload(1, 1, 1)),
                  std::invalid_argument);
}

TEST_CASE("CSV export shape") {
  WorkloadSpec spec = testing::fixed_workload(3, 12, 34);
  const auto csv = workload_to_csv(sample_workload(spec));
  CHECK(csv.rfind("id,arrival,isl,osl\n", 0) == 0);
  CHECK(csv.find("0,0,12,34\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

}  // TEST_SUITE
