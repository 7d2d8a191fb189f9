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

#include "ibpa/outcome.hpp"

#include <limits>
#include <numeric>

namespace ibpa {

MechanismOutcome::MechanismOutcome(std::size_t slots, std::size_t advertisers)
    : assignment(slots),
      quantiles(advertisers, std::numeric_limits<double>::quiet_NaN()),
      critical_quantiles(advertisers, std::numeric_limits<double>::quiet_NaN()),
      expected_payments(advertisers, 0.0),
      per_click_payments(advertisers, 0.0),
      utilities(advertisers, 0.0) {}

std::optional<std::size_t> MechanismOutcome::slot_of(std::size_t advertiser) const {
  for (std::size_t s = 0; s < assignment.size(); ++s) {
    if (assignment[s] == advertiser) return s;
  }
  return std::nullopt;
}

bool MechanismOutcome::any_assigned() const {
  for (const auto& a : assignment) {
    if (a) return true;
  }
  return false;
}

double MechanismOutcome::advertiser_welfare() const {
  return std::accumulate(utilities.begin(), utilities.end(), 0.0);
}

nlohmann::json outcome_to_json(const MechanismOutcome& outcome) {
  nlohmann::json assignment = nlohmann::json::array();
  for (const auto& a : outcome.assignment) {
    if (a) {
      assignment.push_back(*a + 1);
    } else {
      assignment.push_back(nullptr);
    }
  }
  return {{"seed", outcome.seed},
          {"type", outcome.type + 1},
          {"assignment", std::move(assignment)},
          {"payments", outcome.expected_payments},
          {"utilities", outcome.utilities},
          {"revenue", outcome.revenue}};
}

}  // namespace ibpa
