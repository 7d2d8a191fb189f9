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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

namespace ibpa {

// Result of one auction, shared by every mechanism. Per-advertiser vectors are
// indexed by advertiser; entries for non-participants and losers are 0
// (quantiles of non-participants are NaN).
struct MechanismOutcome {
  std::uint64_t seed = 0;
  std::size_t type = 0;
  std::vector<std::optional<std::size_t>> assignment;  // slot -> advertiser
  std::vector<double> quantiles;
  std::vector<double> critical_quantiles;  // NaN unless the advertiser won
  std::vector<double> expected_payments;
  std::vector<double> per_click_payments;
  std::vector<double> utilities;
  double revenue = 0.0;

  MechanismOutcome() = default;
  MechanismOutcome(std::size_t slots, std::size_t advertisers);

  std::optional<std::size_t> slot_of(std::size_t advertiser) const;
  bool any_assigned() const;
  double advertiser_welfare() const;
};

// {seed, type, assignment, payments, utilities, revenue}; type and advertiser
// ids are 1-based, unassigned slots are null.
nlohmann::json outcome_to_json(const MechanismOutcome& outcome);

}  // namespace ibpa
