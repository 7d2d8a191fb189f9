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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibpa/core_model.hpp"
#include "ibpa/outcome.hpp"

namespace ibpa {

enum class GspEquilibrium { kEnvyFreeUpper, kTruthfulProxy };

std::string to_string(GspEquilibrium eq);
GspEquilibrium parse_gsp_equilibrium(std::string_view name);

struct GspConfig {
  Regime regime = Regime::full_info_null_disclosure(1);  // only disc matters
  double reserve = 0.0;  // per click
  GspEquilibrium equilibrium = GspEquilibrium::kEnvyFreeUpper;
};

// Revenue-maximal envy-free bids given scores gamma_a v_a sorted descending.
// Returns score bids in the same order: each winner below the top bids so that
// the winner one slot up is indifferent between its slot and the next one.
std::vector<double> envy_free_upper_bids(std::span<const double> scores,
                                         std::span<const double> alpha);

// Bid values of every advertiser for the block of type t under partition.
std::vector<double> block_bid_values(const AuctionEnvironment& env,
                                     const Partition& partition,
                                     const AuctionInstance& instance);

// Ranks by score (bid times gamma, ties to the lower index) and charges the
// next score over the own gamma per click, floored at the reserve.
MechanismOutcome run_gsp(const AuctionEnvironment& env, const GspConfig& cfg,
                         const AuctionInstance& instance);

}  // namespace ibpa
