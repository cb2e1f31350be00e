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
#include "infersim/model.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace infersim {

namespace {

[[noreturn]] void invalid_field(const std::string& model,
                                const std::string& field,
                                const std::string& why) {
  throw std::invalid_argument("model '" + model + "': field '" + field +
                              "' " + why);
}

}  // namespace

void validate(const ModelSpec& spec) {
  if (spec.name.empty()) invalid_field("<unnamed>", "name", "must be set");
  if (spec.num_layers <= 0)
    invalid_field(spec.name, "num_layers", "must be positive");
  if (spec.hidden_size <= 0)
    invalid_field(spec.name, "hidden_size", "must be positive");
  if (spec.num_heads <= 0)
    invalid_field(spec.name, "num_heads", "must be positive");
  if (spec.num_kv_heads <= 0)
    invalid_field(spec.name, "num_kv_heads", "must be positive");
  if (spec.head_dim <= 0)
    invalid_field(spec.name, "head_dim", "must be positive");
  if (spec.num_kv_heads > spec.num_heads)
    invalid_field(spec.name, "num_kv_heads", "exceeds num_heads");
  if (spec.attention == AttentionKind::kGqa &&
      spec.head_dim * spec.num_heads != spec.hidden_size)
    invalid_field(spec.name, "head_dim",
                  "head_dim * num_heads must equal hidden_size for GQA");
  if (spec.attention == AttentionKind::kMla) {
    if (spec.mla.latent_dim <= 0)
      invalid_field(spec.name, "latent_dim", "must be positive for MLA");
    if (spec.mla.rope_dim < 0)
      invalid_field(spec.name, "rope_dim", "must be non-negative");
  }
  if (spec.total_params < 0)
    invalid_field(spec.name, "total_params", "must be non-negative");
  if (spec.active_params < 0 || spec.active_params > spec.total_params)
    invalid_field(spec.name, "active_params",
                  "must lie in [0, total_params]");
  if (spec.dtype_bytes != 1 && spec.dtype_bytes != 2 && spec.dtype_bytes != 4)
    invalid_field(spec.name, "dtype_bytes", "must be one of 1, 2, 4");
  if (spec.moe && spec.moe->num_moe_layers < 0)
    invalid_field(spec.name, "num_moe_layers", "must be non-negative");
  if (spec.moe && spec.moe->num_moe_layers > spec.num_layers)
    invalid_field(spec.name, "num_moe_layers", "exceeds num_layers");
  if (spec.kv_bytes_per_token_override &&
      *spec.kv_bytes_per_token_override <= 0)
    invalid_field(spec.name, "kv_bytes_per_token_override",
                  "must be positive");
}

std::int64_t kv_bytes_per_token(const ModelSpec& spec) {
  if (spec.kv_bytes_per_token_override) return *spec.kv_bytes_per_token_override;
  if (spec.attention == AttentionKind::kMla) {
    return spec.num_layers * (spec.mla.latent_dim + spec.mla.rope_dim) *
           spec.dtype_bytes;
  }
  return 2 * spec.num_layers * spec.num_kv_heads * spec.head_dim *
         spec.dtype_bytes;
}

std::int64_t weight_bytes(const ModelSpec& spec) {
  return spec.total_params * spec.dtype_bytes;
}

std::int64_t active_weight_bytes(const ModelSpec& spec) {
  return spec.active_params * spec.dtype_bytes;
}

double flops_per_token(const ModelSpec& spec) {
  return 2.0 * static_cast<double>(spec.active_params);
}

const ModelSpec& ModelCatalog::at(const std::string& name) const {
  auto it = entries.find(name);
  if (it == entries.end())
    throw std::runtime_error("unknown model preset '" + name + "'");
  return it->second;
}

namespace {

using json = nlohmann::json;

std::int64_t get_count(const json& j, const std::string& model,
                       const std::string& field) {
  if (!j.contains(field))
    invalid_field(model, field, "is missing");
  const auto& v = j.at(field);
  if (v.is_number_float()) {
    double d = v.get<double>();
    return static_cast<std::int64_t>(d);
  }
  return v.get<std::int64_t>();
}

ModelSpec parse_model(const std::string& name, const json& j) {
  ModelSpec spec;
  spec.name = name;
  spec.num_layers = get_count(j, name, "num_layers");
  spec.hidden_size = get_count(j, name, "hidden_size");
  spec.num_heads = get_count(j, name, "num_heads");
  spec.num_kv_heads = get_count(j, name, "num_kv_heads");
  spec.head_dim = get_count(j, name, "head_dim");
  spec.total_params = get_count(j, name, "total_params");
  spec.active_params = j.contains("active_params")
                           ? get_count(j, name, "active_params")
                           : spec.total_params;
  spec.dtype_bytes = get_count(j, name, "dtype_bytes");

  if (!j.contains("attention")) invalid_field(name, "attention", "is missing");
  const auto& attn = j.at("attention");
  if (attn.is_string()) {
    if (attn.get<std::string>() != "GQA")
      invalid_field(name, "attention", "must be \"GQA\" or {\"MLA\": {...}}");
    spec.attention = AttentionKind::kGqa;
  } else if (attn.is_object() && attn.contains("MLA")) {
    spec.attention = AttentionKind::kMla;
    spec.mla.latent_dim = get_count(attn.at("MLA"), name, "latent_dim");
    spec.mla.rope_dim = get_count(attn.at("MLA"), name, "rope_dim");
  } else {
    invalid_field(name, "attention", "must be \"GQA\" or {\"MLA\": {...}}");
  }

  if (j.contains("moe")) {
    MoeConfig moe;
    if (j.at("moe").contains("num_moe_layers"))
      moe.num_moe_layers = get_count(j.at("moe"), name, "num_moe_layers");
    spec.moe = moe;
  }
  if (j.contains("kv_bytes_per_token_override"))
    spec.kv_bytes_per_token_override =
        get_count(j, name, "kv_bytes_per_token_override");

  validate(spec);
  return spec;
}

}  // namespace

ModelCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open model catalog: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  ModelCatalog catalog;
  if (doc.is_null()) return catalog;
  if (!doc.is_object())
    throw std::runtime_error(path.string() +
                             ": expected an object of model entries");
  for (const auto& [name, body] : doc.items()) {
    catalog.entries.emplace(name, parse_model(name, body));
  }
  return catalog;
}

}  // namespace infersim
