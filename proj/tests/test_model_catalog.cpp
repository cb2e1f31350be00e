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
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "infersim/model.hpp"
#include "test_support.hpp"

using namespace infersim;

namespace {

ModelSpec gqa(std::int64_t layers, std::int64_t kv_heads,
              std::int64_t head_dim, std::int64_t dtype) {
  ModelSpec m;
  m.name = "gqa-test";
  m.num_layers = layers;
  m.num_kv_heads = kv_heads;
  m.head_dim = head_dim;
  m.num_heads = kv_heads * 4;
  m.hidden_size = m.num_heads * head_dim;
  m.total_params = 1;
  m.active_params = 1;
  m.dtype_bytes = dtype;
  return m;
}

}  // namespace

TEST_SUITE("model-catalog") {

TEST_CASE("kv bytes per token for GQA geometries") {
  CHECK(kv_bytes_per_token(gqa(64, 8, 128, 2)) == 262'144);
  CHECK(kv_bytes_per_token(gqa(80, 8, 128, 2)) == 327'680);
  CHECK(kv_bytes_per_token(gqa(1, 1, 1, 1)) == 2);
}

TEST_CASE("kv bytes per token for MLA") {
  ModelSpec m;
  m.name = "mla-test";
  m.num_layers = 61;
  m.hidden_size = 7168;
  m.num_heads = 128;
  m.num_kv_heads = 128;
  m.head_dim = 128;
  m.attention = AttentionKind::kMla;
  m.mla = {512, 64};
  m.total_params = 1;
  m.active_params = 1;
  m.dtype_bytes = 2;
  // 61 * (512 + 64) * 2, cross-checked by hand
  CHECK(kv_bytes_per_token(m) == 70'272);

  m.kv_bytes_per_token_override = 123'456;
  CHECK(kv_bytes_per_token(m) == 123'456);
}

TEST_CASE("weight bytes") {
  ModelSpec m = gqa(64, 8, 128, 2);
  m.total_params = 32'000'000'000;
  CHECK(weight_bytes(m) == 64'000'000'000);
  m.total_params = 405'000'000'000;
  CHECK(weight_bytes(m) == 810'000'000'000);
  m.total_params = 0;
  m.active_params = 0;
  CHECK(weight_bytes(m) == 0);
}

TEST_CASE("flops per token is twice the active parameters") {
  ModelSpec m = gqa(61, 8, 128, 2);
  m.total_params = 671'000'000'000;
  m.active_params = 37'000'000'000;
  CHECK(flops_per_token(m) == doctest::Approx(7.4e10));
  m.active_params = 8'000'000'000;
  CHECK(flops_per_token(m) == doctest::Approx(1.6e10));
  m.active_params = 0;
  CHECK(flops_per_token(m) == 0.0);
}

TEST_CASE("kv bytes are linear in layer count") {
  for (std::int64_t layers : {1, 2, 7, 31}) {
    const auto one = kv_bytes_per_token(gqa(layers, 8, 128, 2));
    const auto two = kv_bytes_per_token(gqa(2 * layers, 8, 128, 2));
    CHECK(two == 2 * one);
  }
}

TEST_CASE("MHA-to-GQA footprint ratio equals the head ratio") {
  ModelSpec grouped = gqa(32, 8, 128, 2);  // 32 heads, 8 kv heads
  ModelSpec mha = grouped;
  mha.num_kv_heads = mha.num_heads;
  const double ratio =
      static_cast<double>(kv_bytes_per_token(mha)) /
      static_cast<double>(kv_bytes_per_token(grouped));
  CHECK(ratio == doctest::Approx(static_cast<double>(grouped.num_heads) /
                                 static_cast<double>(grouped.num_kv_heads)));
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 8.0);
}

TEST_CASE("bundled catalog carries the reference models") {
  const auto& models = testing::presets().models;
  for (const char* name :
       {"ds-llama-8b", "ds-qwen-14b", "ds-qwen-32b", "ds-llama-70b",
        "llama-405b", "ds-r1-671b"})
    CHECK(models.contains(name));
  CHECK(kv_bytes_per_token(models.at("ds-qwen-32b")) == 262'144);
  CHECK(kv_bytes_per_token(models.at("ds-llama-70b")) == 327'680);
  CHECK(kv_bytes_per_token(models.at("ds-llama-8b")) == 131'072);
  CHECK(models.at("ds-r1-671b").is_moe());
  CHECK(models.at("ds-r1-671b").moe_layers() == 58);
}

TEST_CASE("load_catalog rejects invariant violations") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad = dir / "infersim-bad-catalog.json";
  {
    std::ofstream out(bad);
    out << R"({"broken": {"num_layers": 4, "hidden_size": 512,
      "num_heads": 4, "num_kv_heads": 8, "head_dim": 128,
      "attention": "GQA", "total_params": 1, "dtype_bytes": 2}})";
  }
  CHECK_THROWS_WITH_AS(load_catalog(bad),
                       doctest::Contains("num_kv_heads"),
                       std::invalid_argument);

  const auto garbled = dir / "infersim-garbled-catalog.json";
  {
    std::ofstream out(garbled);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_catalog(garbled), std::runtime_error);

  const auto empty = dir / "infersim-empty-catalog.json";
  {
    std::ofstream out(empty);
    out << "{}";
  }
  CHECK(load_catalog(empty).entries.empty());
  std::filesystem::remove(bad);
  std::filesystem::remove(garbled);
  std::filesystem::remove(empty);
}

TEST_CASE("validate flags bad dtype and MLA dims") {
  ModelSpec m = gqa(4, 2, 64, 2);
  m.dtype_bytes = 3;
  CHECK_THROWS_AS(validate(m), std::invalid_argument);
  m = gqa(4, 2, 64, 2);
  m.attention = AttentionKind::kMla;
  m.mla = {0, 0};
  CHECK_THROWS_AS(validate(m), std::invalid_argument);
  m = gqa(4, 2, 64, 2);
  m.active_params = m.total_params + 1;
  CHECK_THROWS_AS(validate(m), std::invalid_argument);
}

}  // TEST_SUITE
