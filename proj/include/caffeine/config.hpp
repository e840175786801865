// Copyright 2026 The CAFFEINE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "caffeine/protocols.hpp"

namespace caffeine {

inline constexpr int kConfigSchemaVersion = 1;

/// Builds a config from JSON. Every key is checked against the schema;
/// unknown keys, wrong types and out-of-range values raise ConfigError with
/// the dotted key path.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Reads and parses a config file; missing or malformed files raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Normalized echo of a config (all defaults spelled out).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace caffeine
