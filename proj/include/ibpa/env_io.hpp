// Copyright 2026 The IBPA Authors
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
#include <optional>

#include <json.hpp>

#include "ibpa/core_model.hpp"

namespace ibpa {

struct EnvironmentFile {
  AuctionEnvironment env;
  std::optional<Regime> regime;  // from "partitions" when present
};

// Partition arrays list a 0-based block index for each type, in type order.
EnvironmentFile parse_environment(const nlohmann::json& doc);
EnvironmentFile load_environment(const std::filesystem::path& path);

nlohmann::json environment_to_json(const AuctionEnvironment& env,
                                   const std::optional<Regime>& regime = {});

nlohmann::json prior_to_json(const ValuationPrior& prior);
ValuationPrior prior_from_json(const nlohmann::json& doc, std::size_t types);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace ibpa
