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
#include <span>
#include <vector>

#include "ibpa/core_model.hpp"
#include "ibpa/revenue_curve.hpp"

namespace ibpa {

// Each atom's chosen item in every vertex menu of a curve.
class ChoiceTable {
 public:
  ChoiceTable(const RevenueCurve& curve, const ValuationPrior& prior,
              const InventoryDistribution& p, std::span<const double> beta);

  std::size_t vertex_count() const { return vertices_; }
  std::size_t atom_count() const { return atoms_; }
  std::size_t type_count() const { return types_; }
  std::span<const double> alloc(std::size_t vertex, std::size_t atom) const {
    return {&alloc_[(vertex * atoms_ + atom) * types_], types_};
  }
  double payment(std::size_t vertex, std::size_t atom) const {
    return payment_[vertex * atoms_ + atom];
  }
  // sum_t p_t alloc_t of the chosen item.
  double mass(std::size_t vertex, std::size_t atom) const {
    return mass_[vertex * atoms_ + atom];
  }
  // True iff every chosen item allocates type t with probability 0 or 1.
  bool deterministic(std::size_t t) const;

 private:
  std::size_t vertices_, atoms_, types_;
  std::vector<double> alloc_;
  std::vector<double> payment_;
  std::vector<double> mass_;
};

// Choice in the lottery M(q) between the two vertex menus bracketing q.
struct MixedChoice {
  double alloc_t = 0.0;  // for the requested type
  double mass = 0.0;     // sum_t p_t alloc_t
  double payment = 0.0;
};

MixedChoice mixed_choice(const RevenueCurve& curve, const ChoiceTable& table,
                         double q, std::size_t atom, std::size_t t);

// x^MR sampled on the curve grid, non-increasing, normalized to x(0)=1, x(1)=0.
struct MrAllocationProfile {
  std::vector<double> grid;
  std::vector<double> raw;  // Monte Carlo estimate before projection
  std::vector<double> x;
  bool degenerate = false;  // the advertiser never (or always) wins
  std::size_t violations = 0;  // raw increases larger than 3 standard errors
};

// Who competes with whom inside one (sub-)auction.
struct CompetitionModel {
  std::vector<const RevenueCurve*> curves;  // per advertiser
  std::vector<double> gamma;
  Participation participation;
};

MrAllocationProfile estimate_mr_profile(const CompetitionModel& model,
                                        std::size_t advertiser,
                                        std::span<const double> grid,
                                        std::size_t mc_samples, std::uint64_t seed);

enum class QuantileMode { kNested, kInterim };

// Maps an advertiser's atoms to quantiles for one type. Ranked mappers give
// each atom a band by allocation strength, then resample ties and
// constant-slope curve pieces. Threshold mappers draw u and return the
// smallest q at which the atom's type-t allocation reaches u.
class QuantileMapper {
 public:
  QuantileMapper(QuantileMode mode, std::vector<double> strength,
                 std::span<const double> weights, std::vector<double> seg_lo,
                 std::vector<double> seg_hi);

  // alloc is atom-major: alloc[i * q.size() + v] is the allocation of atom i
  // at cap q[v], non-decreasing in v. Atoms left unserved land uniformly in
  // [saturation, 1], or at exactly 1 when the curve never flattens.
  static QuantileMapper thresholds(std::vector<double> q, std::vector<double> alloc,
                                   double saturation);

  QuantileMode mode() const { return mode_; }
  std::size_t atom_count() const { return lo_.size(); }
  double strength(std::size_t atom) const { return strength_[atom]; }
  // [lo, lo + width) holds the atom's quantiles when it is served.
  double band_lo(std::size_t atom) const { return lo_[atom]; }
  double band_width(std::size_t atom) const { return width_[atom]; }

  double map(std::size_t atom, Rng& rng) const;

 private:
  QuantileMapper() = default;

  QuantileMode mode_ = QuantileMode::kNested;
  std::vector<double> strength_;
  std::vector<double> lo_, width_;
  std::vector<double> seg_lo_, seg_hi_;
  std::vector<double> thr_q_, thr_alloc_;  // threshold mappers only
  double saturation_ = 1.0;
};

// Nested: Q(v) is the smallest cap whose menu serves type t, a lottery being
// resolved by the uniform draw. With several types the result is uniform only
// when type-t coverage tracks q.
QuantileMapper build_nested_mapper(const RevenueCurve& curve, const ChoiceTable& table,
                                   const ValuationPrior& prior, std::size_t t);

// Interim: atoms ranked by type-t allocation in the mixture of menus weighted
// by -dx^MR.
QuantileMapper build_interim_mapper(const RevenueCurve& curve, const ChoiceTable& table,
                                    const ValuationPrior& prior, std::size_t t,
                                    const MrAllocationProfile& profile);

// Interim when a profile is given and the menus randomize t, nested otherwise.
QuantileMapper build_mapper(const RevenueCurve& curve, const ChoiceTable& table,
                            const ValuationPrior& prior, std::size_t t,
                            const MrAllocationProfile* profile);

// Nearest atom under the weighted (p_t beta_t) Euclidean distance.
std::size_t nearest_atom(const ValuationPrior& prior, std::span<const double> v,
                         std::span<const double> weights);

}  // namespace ibpa
