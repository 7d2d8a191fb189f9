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

#include "ibpa/ibpa_mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "ibpa/parallel.hpp"

namespace ibpa {

IbpaArtifacts::IbpaArtifacts(AuctionEnvironment env, Regime regime, IbpaConfig cfg,
                             std::shared_ptr<const CoarsenedEnvironment> coarse)
    : env_(std::move(env)),
      regime_(std::move(regime)),
      cfg_(std::move(cfg)),
      coarse_(std::move(coarse)) {}

IbpaArtifacts IbpaArtifacts::build(const AuctionEnvironment& env, const Regime& regime,
                                   const IbpaConfig& cfg) {
  auto coarse = std::make_shared<const CoarsenedEnvironment>(coarsen_environment(env, regime));
  IbpaArtifacts art(env, regime, cfg, coarse);
  const AuctionEnvironment& cenv = coarse->env;
  const Partition& disc = coarse->disclosure;
  const std::size_t A = cenv.advertiser_count();

  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
  std::vector<Location> block_loc(cenv.type_count(), Location{kNever, 0});
  struct Job {
    std::size_t sub, curve;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < disc.block_count(); ++d) {
    const auto& members = disc.members(d);
    double mass = 0.0;
    for (std::size_t i : members) mass += cenv.inventory()[i];
    if (mass <= 0.0) continue;
    const std::size_t index = art.subs_.size();
    for (std::size_t k = 0; k < members.size(); ++k) block_loc[members[k]] = {index, k};

    SubAuction sub;
    sub.blocks = members;
    sub.prob = mass;
    std::vector<double> local_p;
    for (std::size_t i : members) {
      local_p.push_back(cenv.inventory()[i] / mass);
      sub.beta.push_back(cenv.ctr().beta(i));
    }
    sub.inventory = InventoryDistribution(std::move(local_p));

    std::map<const ValuationPrior*, std::size_t> distinct;
    std::vector<PriorPtr> restricted;
    for (std::size_t a = 0; a < A; ++a) {
      const ValuationPrior& prior = cenv.prior(a);
      auto [it, fresh] = distinct.try_emplace(&prior, restricted.size());
      if (fresh) {
        if (members.size() == cenv.type_count()) {
          restricted.push_back(cenv.prior_ptr(a));
        } else {
          std::vector<std::vector<double>> atoms(prior.atom_count());
          for (std::size_t n = 0; n < prior.atom_count(); ++n) {
            for (std::size_t i : members) atoms[n].push_back(prior.value(n, i));
          }
          std::vector<double> w(prior.weights().begin(), prior.weights().end());
          restricted.push_back(std::make_shared<const ValuationPrior>(
              ValuationPrior::discrete(atoms, std::move(w), prior.label())));
        }
      }
      sub.priors.push_back(restricted[it->second]);
      sub.curve_of.push_back(it->second);
    }
    for (std::size_t c = 0; c < restricted.size(); ++c) jobs.push_back({index, c});
    art.subs_.push_back(std::move(sub));
  }

  // Curves are the expensive part; build them independently.
  std::vector<std::optional<RevenueCurve>> built(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t k) {
    const SubAuction& sub = art.subs_[jobs[k].sub];
    const auto it = std::find(sub.curve_of.begin(), sub.curve_of.end(), jobs[k].curve);
    const ValuationPrior& prior = *sub.priors[static_cast<std::size_t>(it - sub.curve_of.begin())];
    CurveConfig cc = cfg.curve;
    cc.solver.seed = derive_seed(cfg.seed, streams::kSolver, k);
    built[k] = build_curve(prior, sub.inventory, sub.beta, cc);
  });
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    SubAuction& sub = art.subs_[jobs[k].sub];
    const auto it = std::find(sub.curve_of.begin(), sub.curve_of.end(), jobs[k].curve);
    const ValuationPrior& prior = *sub.priors[static_cast<std::size_t>(it - sub.curve_of.begin())];
    sub.curves.push_back(std::move(*built[k]));
    sub.tables.emplace_back(sub.curves.back(), prior, sub.inventory, sub.beta);
  }

  for (std::size_t d = 0; d < art.subs_.size(); ++d) {
    SubAuction& sub = art.subs_[d];
    CompetitionModel model;
    for (std::size_t a = 0; a < A; ++a) {
      model.curves.push_back(&sub.curve(a));
      model.gamma.push_back(cenv.ctr().gamma(a));
    }
    model.participation = cfg.participation;
    sub.profiles.resize(A);
    sub.mappers.resize(A);
    for (std::size_t a = 0; a < A; ++a) {
      const RevenueCurve& curve = sub.curve(a);
      const ChoiceTable& table = sub.table(a);
      for (std::size_t l = 0; l < sub.blocks.size(); ++l) {
        if (cfg.quantile_mode == QuantileMode::kInterim && !table.deterministic(l) &&
            !sub.profiles[a]) {
          sub.profiles[a] = estimate_mr_profile(
              model, a, curve.grid(), cfg.mc_samples,
              derive_seed(cfg.seed, streams::kInterim, d * A + a));
        }
        const MrAllocationProfile* prof = sub.profiles[a] ? &*sub.profiles[a] : nullptr;
        sub.mappers[a].push_back(build_mapper(curve, table, *sub.priors[a], l, prof));
      }
    }
  }

  art.where_.resize(env.type_count());
  for (std::size_t t = 0; t < env.type_count(); ++t) {
    art.where_[t] = block_loc[coarse->block_of_type[t]];
  }
  return art;
}

IbpaArtifacts::Location IbpaArtifacts::locate(std::size_t t) const {
  if (t >= where_.size()) throw InvalidInput("type index out of range");
  if (where_[t].sub >= subs_.size()) throw InvalidInput("type has zero probability");
  return where_[t];
}

double critical_quantile(const RevenueCurve& curve, double gamma,
                         const std::optional<RankKey>& competitor) {
  // Rivals without positive marginal revenue never rank, so they bind like the floor.
  const bool rival = competitor && competitor->mr > 0.0;
  const double floor = rival ? competitor->mr : 0.0;
  for (const CurveSegment& seg : curve.segments()) {
    const double mr = gamma * seg.slope;
    if (mr_equal(mr, floor)) {
      return rival ? std::clamp(competitor->q, seg.q_lo, seg.q_hi) : seg.q_lo;
    }
    if (mr < floor) return seg.q_lo;
  }
  return 1.0;
}

double ibpa_payment(const RevenueCurve& curve, const ChoiceTable& table,
                    std::size_t atom, std::size_t local_type, double gamma,
                    std::span<const double> alpha, std::size_t slot,
                    std::span<const double> critical) {
  double m = 0.0;
  for (std::size_t j = slot; j < alpha.size(); ++j) {
    const double next = j + 1 < alpha.size() ? alpha[j + 1] : 0.0;
    const MixedChoice c = mixed_choice(curve, table, critical[j - slot], atom, local_type);
    if (c.mass > 0.0) m += (alpha[j] - next) * c.payment / c.mass;
  }
  return gamma * m;
}

MechanismOutcome run_ibpa(const IbpaArtifacts& artifacts, const AuctionInstance& instance) {
  const AuctionEnvironment& env = artifacts.environment();
  const CtrModel& ctr = env.ctr();
  const std::size_t S = env.slot_count();
  MechanismOutcome out(S, env.advertiser_count());
  out.seed = instance.seed;
  out.type = instance.type;

  const auto [d, local] = artifacts.locate(instance.type);
  const SubAuction& sub = artifacts.sub_auction(d);
  const std::vector<double> alpha(ctr.slot_effects().begin(), ctr.slot_effects().end());

  std::vector<RankKey> ranked;
  for (std::size_t a : instance.participants) {
    Rng rng(derive_seed(instance.seed, streams::kMechanism, a));
    const double q = sub.mappers[a][local].map(instance.atom[a], rng);
    out.quantiles[a] = q;
    const double mr = ctr.gamma(a) * sub.curve(a).marginal(q);
    if (mr > 0.0 && q < 1.0) ranked.push_back({mr, q, a});
  }
  std::sort(ranked.begin(), ranked.end(), ranks_above);

  // A winner whose menu at its critical quantile excludes the realized type
  // gives up the slot; everyone below moves up and prices are recomputed.
  for (;;) {
    const std::size_t winners = std::min(S, ranked.size());
    std::vector<std::vector<double>> crit(winners);
    std::optional<std::size_t> vacate;
    for (std::size_t s = 0; s < winners && !vacate; ++s) {
      const std::size_t a = ranked[s].index;
      for (std::size_t j = s; j < S; ++j) {
        std::optional<RankKey> rival;
        if (j + 1 < ranked.size()) rival = ranked[j + 1];
        crit[s].push_back(
            std::max(critical_quantile(sub.curve(a), ctr.gamma(a), rival), ranked[s].q));
      }
      const MixedChoice own =
          mixed_choice(sub.curve(a), sub.table(a), crit[s][0], instance.atom[a], local);
      if (own.alloc_t <= 0.0) vacate = s;
    }
    if (vacate) {
      ranked.erase(ranked.begin() + static_cast<std::ptrdiff_t>(*vacate));
      continue;
    }
    for (std::size_t s = 0; s < winners; ++s) {
      const std::size_t a = ranked[s].index;
      out.assignment[s] = a;
      out.critical_quantiles[a] = crit[s][0];
      const double m = ibpa_payment(sub.curve(a), sub.table(a), instance.atom[a], local,
                                    ctr.gamma(a), alpha, s, crit[s]);
      out.expected_payments[a] = m;
      out.per_click_payments[a] = m / (alpha[s] * sub.beta[local] * ctr.gamma(a));
      out.utilities[a] =
          ctr.ctr(a, s, instance.type) * env.prior(a).value(instance.atom[a], instance.type) - m;
      out.revenue += m;
    }
    break;
  }
  return out;
}

}  // namespace ibpa
