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

#include <string>

#include <nlohmann/json.hpp>

#include "caffeine/protocols.hpp"

namespace caffeine {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const OptimizationResult& r);
nlohmann::json to_json(const PiecewiseBeta& b);

nlohmann::json to_json(const StatePrepReport& r);
nlohmann::json to_json(const AnnealReport& r);
nlohmann::json to_json(const LearningReport& r);
nlohmann::json to_json(const ExactCdReport& r);
nlohmann::json to_json(const LandscapeReport& r);

// CSV exports: header row first, fixed column order, round-trip precision.
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);
std::string anneal_csv(const std::vector<AnnealRow>& rows);
/// Oracle columns appear only for the two-qubit model.
std::string learning_csv(const LearningReport& r, double tau);
std::string landscape_csv(const LandscapeReport& r);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

}  // namespace caffeine
