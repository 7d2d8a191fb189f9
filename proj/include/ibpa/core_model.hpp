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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ibpa/errors.hpp"
#include "ibpa/rng.hpp"

namespace ibpa {

inline constexpr double kProbabilityTolerance = 1e-12;

// Distribution p_t over inventory types.
class InventoryDistribution {
 public:
  explicit InventoryDistribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t t) const { return probs_[t]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// CTR of (advertiser a, slot s, type t) is alpha_s * beta_t * gamma_a.
class CtrModel {
 public:
  CtrModel(std::vector<double> slot_effects, std::vector<double> type_effects,
           std::vector<double> advertiser_quality);

  // Skips the beta_1 = 1 normalization; used for environments whose types are
  // blocks of an underlying normalized environment.
  static CtrModel unnormalized(std::vector<double> slot_effects,
                               std::vector<double> type_effects,
                               std::vector<double> advertiser_quality);

  std::size_t slot_count() const { return alpha_.size(); }
  std::size_t type_count() const { return beta_.size(); }
  std::size_t advertiser_count() const { return gamma_.size(); }

  double alpha(std::size_t s) const { return alpha_[s]; }
  double beta(std::size_t t) const { return beta_[t]; }
  double gamma(std::size_t a) const { return gamma_[a]; }
  // alpha with alpha_{S} = 0 past the last slot.
  double alpha_or_zero(std::size_t s) const {
    return s < alpha_.size() ? alpha_[s] : 0.0;
  }
  double ctr(std::size_t a, std::size_t s, std::size_t t) const {
    return alpha_[s] * beta_[t] * gamma_[a];
  }

  std::span<const double> slot_effects() const { return alpha_; }
  std::span<const double> type_effects() const { return beta_; }
  std::span<const double> advertiser_quality() const { return gamma_; }

 private:
  CtrModel(std::vector<double> slot_effects, std::vector<double> type_effects,
           std::vector<double> advertiser_quality, bool normalized);

  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> gamma_;
};

// Finite prior over valuation vectors: weighted atoms, or N equal-weight
// draws fixed at construction.
class ValuationPrior {
 public:
  enum class Kind { kDiscrete, kSampled };

  // atoms[i] is a valuation vector over all types.
  static ValuationPrior discrete(const std::vector<std::vector<double>>& atoms,
                                 std::vector<double> weights,
                                 std::string label = {});
  // Draws n vectors with draw(rng); deterministic given seed.
  static ValuationPrior sampled(
      const std::function<std::vector<double>(Rng&)>& draw, std::size_t n,
      std::uint64_t seed, std::string label = {});
  // Equal-weight atoms, recorded as sampled draws (used by file loading).
  static ValuationPrior from_samples(
      const std::vector<std::vector<double>>& samples, std::string label = {});

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  std::size_t atom_count() const { return weights_.size(); }
  std::size_t type_count() const { return types_; }
  double weight(std::size_t i) const { return weights_[i]; }
  double value(std::size_t i, std::size_t t) const {
    return values_[i * types_ + t];
  }
  std::span<const double> atom(std::size_t i) const {
    return {values_.data() + i * types_, types_};
  }
  std::span<const double> weights() const { return weights_; }

  // Index of an atom drawn with probability proportional to its weight.
  std::size_t draw_atom(Rng& rng) const;

 private:
  ValuationPrior(Kind kind, std::size_t types, std::vector<double> values,
                 std::vector<double> weights, std::string label);

  Kind kind_;
  std::size_t types_;
  std::vector<double> values_;  // row-major atom x type
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::string label_;
};

using PriorPtr = std::shared_ptr<const ValuationPrior>;

// Partition of types [T] into contiguous-labelled blocks.
class Partition {
 public:
  explicit Partition(std::vector<std::size_t> block_of);

  static Partition full(std::size_t types);  // singletons
  static Partition null(std::size_t types);  // one block

  std::size_t type_count() const { return block_of_.size(); }
  std::size_t block_count() const { return block_count_; }
  std::size_t block_of(std::size_t t) const { return block_of_[t]; }
  std::span<const std::size_t> labels() const { return block_of_; }
  const std::vector<std::size_t>& members(std::size_t block) const {
    return members_[block];
  }

  bool operator==(const Partition& other) const {
    return block_of_ == other.block_of_;
  }

 private:
  std::vector<std::size_t> block_of_;
  std::size_t block_count_ = 0;
  std::vector<std::vector<std::size_t>> members_;
};

// True iff p1 is at least as granular as p2.
bool is_refinement(const Partition& p1, const Partition& p2);

// All partitions of [T] in restricted-growth-string order.
std::vector<Partition> enumerate_partitions(std::size_t types);

struct Regime {
  Partition info;
  Partition disc;

  Regime(Partition info_partition, Partition disc_partition);
  static Regime full_info_null_disclosure(std::size_t types);
  std::string describe() const;
};

class AuctionEnvironment {
 public:
  AuctionEnvironment(InventoryDistribution inventory, CtrModel ctr,
                     std::vector<PriorPtr> priors);

  const InventoryDistribution& inventory() const { return inventory_; }
  const CtrModel& ctr() const { return ctr_; }
  const ValuationPrior& prior(std::size_t a) const { return *priors_[a]; }
  const PriorPtr& prior_ptr(std::size_t a) const { return priors_[a]; }
  const std::vector<PriorPtr>& priors() const { return priors_; }

  std::size_t type_count() const { return inventory_.size(); }
  std::size_t slot_count() const { return ctr_.slot_count(); }
  std::size_t advertiser_count() const { return priors_.size(); }

  // p_t * beta_t, the weight of type t in an advertiser's utility.
  std::vector<double> utility_weights() const;

 private:
  InventoryDistribution inventory_;
  CtrModel ctr_;
  std::vector<PriorPtr> priors_;
};

struct CoarsenedEnvironment {
  AuctionEnvironment env;        // types are the information blocks
  Partition disclosure;          // disclosure partition over those blocks
  std::vector<std::size_t> block_of_type;
};

CoarsenedEnvironment coarsen_environment(const AuctionEnvironment& env,
                                         const Regime& regime);

// Block valuation: CTR-weighted (p_t beta_t) average over the block members.
double block_value(const AuctionEnvironment& env, std::span<const double> v,
                   std::span<const std::size_t> members);

// How many advertisers take part in each auction. The default is everyone.
struct Participation {
  std::size_t min_count = 0;  // 0 means "all advertisers"
  std::size_t max_count = 0;

  bool everyone() const { return min_count == 0 && max_count == 0; }
};

struct AuctionInstance {
  std::uint64_t seed = 0;
  std::size_t type = 0;
  std::vector<std::size_t> participants;  // ascending advertiser indices
  std::vector<std::size_t> atom;          // atom index per advertiser
};

AuctionInstance sample_auction(const AuctionEnvironment& env,
                               std::uint64_t seed,
                               const Participation& participation = {});

}  // namespace ibpa
