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

#include "ibpa/gsp_mechanism.hpp"

#include <algorithm>
#include <numeric>

namespace ibpa {

std::string to_string(GspEquilibrium eq) {
  return eq == GspEquilibrium::kEnvyFreeUpper ? "envy_free_upper" : "truthful_proxy";
}

GspEquilibrium parse_gsp_equilibrium(std::string_view name) {
  if (name == "envy_free_upper" || name == "upper") return GspEquilibrium::kEnvyFreeUpper;
  if (name == "truthful_proxy" || name == "truthful") return GspEquilibrium::kTruthfulProxy;
  throw InvalidInput("unknown GSP equilibrium: " + std::string(name));
}

std::vector<double> envy_free_upper_bids(std::span<const double> scores,
                                         std::span<const double> alpha) {
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[k - 1]) throw InvalidInput("scores must be sorted descending");
  }
  std::vector<double> bids(scores.begin(), scores.end());
  const std::size_t n = scores.size();
  const std::size_t winners = std::min(n, alpha.size());
  if (winners < 2) return bids;
  // Price score of the last winner: the first loser's score, or nothing.
  double below = winners < n ? scores[winners] : 0.0;
  for (std::size_t s = winners - 1; s >= 1; --s) {
    const double a_up = alpha[s - 1];
    const double a_here = alpha[s];
    bids[s] = ((a_up - a_here) * scores[s - 1] + a_here * below) / a_up;
    below = bids[s];
  }
  return bids;
}

std::vector<double> block_bid_values(const AuctionEnvironment& env,
                                     const Partition& partition,
                                     const AuctionInstance& instance) {
  if (partition.type_count() != env.type_count()) {
    throw InvalidInput("partition does not match the environment's T");
  }
  const auto& members = partition.members(partition.block_of(instance.type));
  std::vector<double> values(env.advertiser_count(), 0.0);
  for (std::size_t a : instance.participants) {
    values[a] = block_value(env, env.prior(a).atom(instance.atom[a]), members);
  }
  return values;
}

MechanismOutcome run_gsp(const AuctionEnvironment& env, const GspConfig& cfg,
                         const AuctionInstance& instance) {
  const CtrModel& ctr = env.ctr();
  const std::size_t S = env.slot_count();
  const std::size_t t = instance.type;
  MechanismOutcome out(S, env.advertiser_count());
  out.seed = instance.seed;
  out.type = t;

  const std::vector<double> values = block_bid_values(env, cfg.regime.disc, instance);
  std::vector<std::size_t> order(instance.participants);
  auto by_score = [&](std::size_t a, std::size_t b) {
    const double sa = ctr.gamma(a) * values[a];
    const double sb = ctr.gamma(b) * values[b];
    return sa != sb ? sa > sb : a < b;
  };
  std::sort(order.begin(), order.end(), by_score);

  std::vector<double> scores;
  for (std::size_t a : order) scores.push_back(ctr.gamma(a) * values[a]);
  if (cfg.equilibrium == GspEquilibrium::kEnvyFreeUpper) {
    scores = envy_free_upper_bids(scores, ctr.slot_effects());
  }

  // Only bids above the reserve are eligible.
  std::size_t eligible = 0;
  while (eligible < order.size() && scores[eligible] > cfg.reserve * ctr.gamma(order[eligible])) {
    ++eligible;
  }
  const std::size_t winners = std::min(S, eligible);
  for (std::size_t s = 0; s < winners; ++s) {
    const std::size_t a = order[s];
    const double next = s + 1 < eligible ? scores[s + 1] : 0.0;
    const double price = std::max(cfg.reserve, next / ctr.gamma(a));
    const double clicks = ctr.ctr(a, s, t);
    out.assignment[s] = a;
    out.per_click_payments[a] = price;
    out.expected_payments[a] = clicks * price;
    out.utilities[a] = clicks * (env.prior(a).value(instance.atom[a], t) - price);
    out.revenue += out.expected_payments[a];
  }
  return out;
}

}  // namespace ibpa
