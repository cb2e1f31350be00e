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

#include <filesystem>
#include <string>

#include "infersim/engine.hpp"
#include "infersim/hardware.hpp"
#include "infersim/model.hpp"
#include "infersim/workload.hpp"

namespace infersim {

/// The bundled model/hardware/workload presets, loaded from a directory
/// holding models.json, hardware.json and workloads.json.
struct PresetBundle {
  ModelCatalog models;
  HardwareCatalog hardware;
  WorkloadPresets workloads;
};

PresetBundle load_presets(const std::filesystem::path& dir);

/// Parses a scenario file, resolving model/hardware/workload preset names
/// through `presets`. Validates the result.
Scenario load_scenario(const std::filesystem::path& path,
                       const PresetBundle& presets);

/// Parses a standalone workload spec file (same schema as the scenario's
/// workload block).
WorkloadSpec load_workload_spec(const std::filesystem::path& path,
                                const PresetBundle& presets);

}  // namespace infersim
