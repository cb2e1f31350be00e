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
#include <optional>
#include <string>

namespace infersim {

enum class AttentionKind { kGqa, kMla };

/// Latent/rope widths for MLA models; the per-token cache holds one
/// compressed latent of (latent_dim + rope_dim) elements per layer.
struct MlaDims {
  std::int64_t latent_dim = 0;
  std::int64_t rope_dim = 0;
};

struct MoeConfig {
  std::int64_t num_moe_layers = 0;  // 0 means "all layers"
};

/// Architecture parameters from which all memory/compute costs derive.
struct ModelSpec {
  std::string name;
  std::int64_t num_layers = 0;
  std::int64_t hidden_size = 0;
  std::int64_t num_heads = 0;
  std::int64_t num_kv_heads = 0;
  std::int64_t head_dim = 0;
  AttentionKind attention = AttentionKind::kGqa;
  MlaDims mla;  // only meaningful when attention == kMla
  std::int64_t total_params = 0;
  std::int64_t active_params = 0;
  std::int64_t dtype_bytes = 2;
  std::optional<MoeConfig> moe;
  // Forces a fixed per-token KV size for replication runs where a published
  // figure disagrees with the architectural formula.
  std::optional<std::int64_t> kv_bytes_per_token_override;

  bool is_moe() const { return moe.has_value(); }
  std::int64_t moe_layers() const {
    if (!moe) return 0;
    return moe->num_moe_layers > 0 ? moe->num_moe_layers : num_layers;
  }
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ModelSpec& spec);

/// KV bytes appended per generated/prefilled token.
/// GQA: 2 * L * kv_heads * head_dim * dtype_bytes (K and V per layer).
/// MLA: L * (latent_dim + rope_dim) * dtype_bytes (one latent per layer).
std::int64_t kv_bytes_per_token(const ModelSpec& spec);

/// Resident weight footprint: total_params * dtype_bytes.
std::int64_t weight_bytes(const ModelSpec& spec);

/// Weight bytes actually streamed per forward step. Differs from
/// weight_bytes only for MoE models, where just the active experts are read.
std::int64_t active_weight_bytes(const ModelSpec& spec);

/// GEMM-dominated estimate: 2 * active_params.
double flops_per_token(const ModelSpec& spec);

struct ModelCatalog {
  std::map<std::string, ModelSpec> entries;

  const ModelSpec& at(const std::string& name) const;
  bool contains(const std::string& name) const {
    return entries.count(name) > 0;
  }
};

/// Loads a JSON catalog (one object per model, field names as in ModelSpec)
/// and validates every entry. Throws std::runtime_error with file context on
/// parse failure, std::invalid_argument on invariant violations.
ModelCatalog load_catalog(const std::filesystem::path& path);

}  // namespace infersim
