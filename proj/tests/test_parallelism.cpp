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
#include <set>

#include "doctest.h"
#include "infersim/parallelism.hpp"
#include "test_support.hpp"

using namespace infersim;

namespace {

// Brute-force reference: every ordered triple with the right product.
std::set<std::tuple<int, int, int>> brute_force_triples(int n) {
  std::set<std::tuple<int, int, int>> triples;
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      for (int c = 1; c <= n; ++c)
        if (a * b * c == n) triples.insert({a, b, c});
  return triples;
}

}  // namespace

TEST_SUITE("parallelism-model") {

TEST_CASE("enumerate_configs matches brute force") {
  for (int n : {1, 2, 3, 4, 6, 8, 12, 16}) {
    const auto configs = enumerate_configs(n);
    const auto expected = brute_force_triples(n);
    REQUIRE(configs.size() == expected.size());
    std::set<std::tuple<int, int, int>> got;
    for (const auto& c : configs) got.insert({c.dp, c.tp, c.pp});
    CHECK(got == expected);
    CHECK(std::is_sorted(configs.begin(), configs.end()));
  }
  CHECK(enumerate_configs(1).size() == 1);
  // 4 = 2^2 factors into C(4,2) = 6 ordered triples
  CHECK(enumerate_configs(4).size() == 6);
  CHECK(enumerate_configs(8).size() == 10);
}

TEST_CASE("enumerate_configs(8) covers the node layouts of interest") {
  const auto configs = enumerate_configs(8);
  auto has = [&](int dp, int tp, int pp) {
    return std::find(configs.begin(), configs.end(),
                     ParallelismConfig{dp, tp, pp}) != configs.end();
  };
  CHECK(has(8, 1, 1));
  CHECK(has(1, 8, 1));
  CHECK(has(1, 1, 8));
  CHECK(has(4, 2, 1));
  CHECK(has(2, 4, 1));
  CHECK(has(1, 4, 2));
  CHECK(has(1, 2, 4));
}

TEST_CASE("placement reproduces the 32B capacity arithmetic") {
  const auto& bundle = testing::presets();
  const ModelSpec& model = bundle.models.at("ds-qwen-32b");
  const HardwareSpec& hw = bundle.hardware.at("h200-node");
  SchedulerConfig sched;
  sched.gpu_memory_utilization = 1.0;

  const auto dp8 = placement(model, hw, {8, 1, 1}, sched);
  CHECK(dp8.weight_bytes_per_gpu == doctest::Approx(64e9));
  CHECK(dp8.kv_headroom_per_gpu == doctest::Approx(77e9));
  CHECK(dp8.feasible);

  const auto tp8 = placement(model, hw, {1, 8, 1}, sched);
  CHECK(tp8.weight_bytes_per_gpu == doctest::Approx(8e9));
  CHECK(tp8.kv_headroom_per_gpu == doctest::Approx(133e9));
  CHECK(tp8.feasible);
}

TEST_CASE("oversized dense weights are infeasible, as a value") {
  const auto& bundle = testing::presets();
  const auto report = placement(bundle.models.at("llama-405b"),
                                bundle.hardware.at("h200-node"), {8, 1, 1},
                                SchedulerConfig{});
  CHECK_FALSE(report.feasible);
  CHECK(report.infeasibility_reason.find("GB") != std::string::npos);
  CHECK(report.kv_pool_tokens_per_replica == 0);
}

TEST_CASE("weight shards conserve the total") {
  const auto& bundle = testing::presets();
  const ModelSpec& model = bundle.models.at("ds-qwen-14b");
  for (const auto& cfg : enumerate_configs(8)) {
    const auto report = placement(model, bundle.hardware.at("h200-node"), cfg,
                                  SchedulerConfig{});
    CHECK(report.weight_bytes_per_gpu * cfg.shards_per_replica() ==
          doctest::Approx(static_cast<double>(weight_bytes(model))));
  }
}

TEST_CASE("per-replica pool never shrinks as sharding grows") {
  const auto& bundle = testing::presets();
  const ModelSpec& model = bundle.models.at("ds-qwen-32b");
  const HardwareSpec& hw = bundle.hardware.at("h200-node");
  std::int64_t prev = -1;
  for (int shards : {1, 2, 4, 8}) {
    const auto report =
        placement(model, hw, {8 / shards, shards, 1}, SchedulerConfig{});
    CHECK(report.kv_pool_tokens_per_replica >= prev);
    prev = report.kv_pool_tokens_per_replica;
  }
}

TEST_CASE("ring all-reduce cost") {
  HardwareSpec hw;
  hw.link_bandwidth = 900e9;
  hw.link_latency = 5e-6;
  CHECK(allreduce_time(1e9, 1, hw) == 0.0);
  // 2*(7/8)*16MiB/900GB/s + 14*5us
  const double expected = 2.0 * 7.0 / 8.0 * 16'777'216.0 / 900e9 + 14 * 5e-6;
  CHECK(allreduce_time(16'777'216.0, 8, hw) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(allreduce_time(16'777'216.0, 8, hw) ==
        doctest::Approx(1.026e-4).epsilon(1e-3));
  CHECK(allreduce_time(0.0, 8, hw) == doctest::Approx(14 * 5e-6));

  // monotone in bytes and in degree
  CHECK(allreduce_time(2e6, 4, hw) > allreduce_time(1e6, 4, hw));
  CHECK(allreduce_time(1e6, 8, hw) > allreduce_time(1e6, 2, hw));
}

TEST_CASE("pipeline bubble fraction") {
  CHECK(pp_bubble_fraction(1, 1) == 0.0);
  CHECK(pp_bubble_fraction(1, 1000) == 0.0);
  CHECK(pp_bubble_fraction(4, 4) == doctest::Approx(3.0 / 7.0));
  CHECK(pp_bubble_fraction(8, 1) == doctest::Approx(7.0 / 8.0));
  // vanishes as microbatches grow
  CHECK(pp_bubble_fraction(4, 1'000'000) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("parallelism parsing") {
  const auto cfg = parse_parallelism("4x2x1");
  CHECK(cfg.dp == 4);
  CHECK(cfg.tp == 2);
  CHECK(cfg.pp == 1);
  CHECK_THROWS_AS(parse_parallelism("4-2-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_parallelism("0x2x1"), std::invalid_argument);
}

}  // TEST_SUITE
