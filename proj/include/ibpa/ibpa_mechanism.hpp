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
#include <memory>
#include <optional>
#include <vector>

#include "ibpa/core_model.hpp"
#include "ibpa/outcome.hpp"
#include "ibpa/quantile.hpp"
#include "ibpa/ranking.hpp"
#include "ibpa/revenue_curve.hpp"

namespace ibpa {

struct IbpaConfig {
  CurveConfig curve;
  // Interim ranks lottery menus through x^MR; nested uses allocation thresholds.
  QuantileMode quantile_mode = QuantileMode::kNested;
  std::size_t mc_samples = 10000;  // draws per x^MR profile
  Participation participation;
  std::uint64_t seed = 1;
  std::size_t threads = 1;  // 0 = hardware concurrency
};

// Auction run after the publisher discloses one block: its local types are
// the information blocks inside the disclosed block.
struct SubAuction {
  std::vector<std::size_t> blocks;  // information blocks, ascending
  double prob = 0.0;                // probability of this disclosure
  InventoryDistribution inventory{std::vector<double>{1.0}};  // conditional
  std::vector<double> beta;
  std::vector<PriorPtr> priors;          // per advertiser, atom-aligned
  std::vector<RevenueCurve> curves;      // one per distinct prior
  std::vector<ChoiceTable> tables;       // parallel to curves
  std::vector<std::size_t> curve_of;     // per advertiser
  std::vector<std::optional<MrAllocationProfile>> profiles;  // per advertiser
  std::vector<std::vector<QuantileMapper>> mappers;  // [advertiser][local type]

  const RevenueCurve& curve(std::size_t a) const { return curves[curve_of[a]]; }
  const ChoiceTable& table(std::size_t a) const { return tables[curve_of[a]]; }
};

// Curves, choice tables and quantile mappers for every disclosure block.
class IbpaArtifacts {
 public:
  static IbpaArtifacts build(const AuctionEnvironment& env, const Regime& regime,
                             const IbpaConfig& cfg);

  struct Location {
    std::size_t sub = 0;
    std::size_t local = 0;
  };

  const AuctionEnvironment& environment() const { return env_; }
  const CoarsenedEnvironment& coarse() const { return *coarse_; }
  const Regime& regime() const { return regime_; }
  const IbpaConfig& config() const { return cfg_; }
  std::size_t sub_auction_count() const { return subs_.size(); }
  const SubAuction& sub_auction(std::size_t d) const { return subs_[d]; }
  // Sub-auction and local type for original type t.
  Location locate(std::size_t t) const;

 private:
  IbpaArtifacts(AuctionEnvironment env, Regime regime, IbpaConfig cfg,
                std::shared_ptr<const CoarsenedEnvironment> coarse);

  AuctionEnvironment env_;
  Regime regime_;
  IbpaConfig cfg_;
  std::shared_ptr<const CoarsenedEnvironment> coarse_;
  std::vector<SubAuction> subs_;
  std::vector<Location> where_;  // per original type
};

// Largest quantile at which an advertiser with this curve still ranks above
// the competitor (or above the zero floor when there is none).
double critical_quantile(const RevenueCurve& curve, double gamma,
                         const std::optional<RankKey>& competitor);

// Expected payment of a winner holding slot `slot`: gamma times the sum over
// j >= slot of (alpha_j - alpha_{j+1}) mu/X in the menu at the critical
// quantile for slot j, which is critical[j - slot].
double ibpa_payment(const RevenueCurve& curve, const ChoiceTable& table,
                    std::size_t atom, std::size_t local_type, double gamma,
                    std::span<const double> alpha, std::size_t slot,
                    std::span<const double> critical);

MechanismOutcome run_ibpa(const IbpaArtifacts& artifacts, const AuctionInstance& instance);

}  // namespace ibpa
