// Copyright 2026 The Odif Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ODIF_SERIALIZATION_HPP_
#define ODIF_SERIALIZATION_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "odif/forest.hpp"
#include "odif/omni_learner.hpp"
#include "odif/voter.hpp"

namespace odif {

// Model file layout:
//
//   ODIF-MODEL <format_version> <crc32 of body, 8 hex digits> <body bytes>\n
//   <JSON body>
//
// The body holds format_version, the learner config, task records (with
// retained data when present), representers as nested node records and
// voter tables as dense per-leaf arrays.

inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const OmniLearner& learner);
OmniLearner deserialize_model(std::string_view text);

void save_model(const OmniLearner& learner, const std::filesystem::path& path);
OmniLearner load_model(const std::filesystem::path& path);

nlohmann::json to_json(const ForestConfig& config);
nlohmann::json to_json(const LearnerConfig& config);
nlohmann::json to_json(const ForestRepresenter& rep);
nlohmann::json to_json(const Voter& voter);
nlohmann::json to_json(const TaskDataset& data);

// Strict readers: unknown keys are rejected. Missing keys keep the
// defaults of `base`.
ForestConfig forest_config_from_json(const nlohmann::json& j, ForestConfig base = {});
StrategyConfig strategy_config_from_json(const nlohmann::json& j, StrategyConfig base = {});
LearnerConfig learner_config_from_json(const nlohmann::json& j, LearnerConfig base = {});
ForestRepresenter representer_from_json(const nlohmann::json& j);
Voter voter_from_json(const nlohmann::json& j);
TaskDataset dataset_from_json(const nlohmann::json& j, TaskId task_id, std::size_t class_count);

/// Canonical serialized bytes, used to compare model parts.
std::string canonical_bytes(const ForestRepresenter& rep);
std::string canonical_bytes(const Voter& voter);

}  // namespace odif

#endif  // ODIF_SERIALIZATION_HPP_
