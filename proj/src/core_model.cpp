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

#include "ibpa/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ibpa {

InventoryDistribution::InventoryDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("inventory distribution needs T >= 1");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InvalidInput("inventory probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance * probs_.size() * 10) {
    throw InvalidInput("inventory probabilities must sum to 1");
  }
}

CtrModel::CtrModel(std::vector<double> slot_effects,
                   std::vector<double> type_effects,
                   std::vector<double> advertiser_quality)
    : CtrModel(std::move(slot_effects), std::move(type_effects),
               std::move(advertiser_quality), true) {}

CtrModel CtrModel::unnormalized(std::vector<double> slot_effects,
                                std::vector<double> type_effects,
                                std::vector<double> advertiser_quality) {
  return CtrModel(std::move(slot_effects), std::move(type_effects),
                  std::move(advertiser_quality), false);
}

CtrModel::CtrModel(std::vector<double> slot_effects,
                   std::vector<double> type_effects,
                   std::vector<double> advertiser_quality, bool normalized)
    : alpha_(std::move(slot_effects)),
      beta_(std::move(type_effects)),
      gamma_(std::move(advertiser_quality)) {
  if (alpha_.empty()) throw InvalidInput("need at least one slot");
  if (beta_.empty()) throw InvalidInput("need at least one type effect");
  if (std::abs(alpha_[0] - 1.0) > 1e-12) {
    throw InvalidInput("slot effects must be normalized so alpha_1 = 1");
  }
  for (std::size_t s = 0; s < alpha_.size(); ++s) {
    if (!(alpha_[s] > 0.0)) throw InvalidInput("slot effects must be > 0");
    if (s > 0 && alpha_[s] > alpha_[s - 1]) {
      throw InvalidInput("slot effects must be non-increasing");
    }
  }
  if (normalized && std::abs(beta_[0] - 1.0) > 1e-12) {
    throw InvalidInput("type effects must be normalized so beta_1 = 1");
  }
  for (double b : beta_) {
    if (!(b > 0.0)) throw InvalidInput("type effects must be > 0");
  }
  for (double g : gamma_) {
    if (!(g > 0.0)) throw InvalidInput("advertiser quality must be > 0");
  }
  if (!gamma_.empty()) {
    double top = alpha_[0] * *std::max_element(beta_.begin(), beta_.end()) *
                 *std::max_element(gamma_.begin(), gamma_.end());
    if (top > 1.0 + 1e-12) throw InvalidInput("CTR must lie in (0, 1]");
  }
}

ValuationPrior::ValuationPrior(Kind kind, std::size_t types,
                               std::vector<double> values,
                               std::vector<double> weights, std::string label)
    : kind_(kind),
      types_(types),
      values_(std::move(values)),
      weights_(std::move(weights)),
      label_(std::move(label)) {
  if (types_ == 0) throw InvalidInput("valuation prior needs T >= 1");
  if (weights_.empty()) throw InvalidInput("valuation prior needs atoms");
  if (values_.size() != weights_.size() * types_) {
    throw InvalidInput("valuation atoms have inconsistent dimension");
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInput("valuations must be finite and >= 0");
    }
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvalidInput("prior weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidInput("prior weights must sum to 1");
  }
  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
}

ValuationPrior ValuationPrior::discrete(
    const std::vector<std::vector<double>>& atoms, std::vector<double> weights,
    std::string label) {
  if (atoms.empty()) throw InvalidInput("valuation prior needs atoms");
  if (atoms.size() != weights.size()) {
    throw InvalidInput("one weight per atom required");
  }
  const std::size_t types = atoms.front().size();
  std::vector<double> values;
  values.reserve(atoms.size() * types);
  for (const auto& v : atoms) {
    if (v.size() != types) throw InvalidInput("atoms must share dimension");
    values.insert(values.end(), v.begin(), v.end());
  }
  return ValuationPrior(Kind::kDiscrete, types, std::move(values),
                        std::move(weights), std::move(label));
}

ValuationPrior ValuationPrior::sampled(
    const std::function<std::vector<double>(Rng&)>& draw, std::size_t n,
    std::uint64_t seed, std::string label) {
  if (n == 0) throw InvalidInput("sampled prior needs N >= 1");
  Rng rng(seed);
  std::vector<std::vector<double>> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) samples.push_back(draw(rng));
  return from_samples(samples, std::move(label));
}

ValuationPrior ValuationPrior::from_samples(
    const std::vector<std::vector<double>>& samples, std::string label) {
  if (samples.empty()) throw InvalidInput("sampled prior needs N >= 1");
  const std::size_t types = samples.front().size();
  std::vector<double> values;
  values.reserve(samples.size() * types);
  for (const auto& v : samples) {
    if (v.size() != types) throw InvalidInput("samples must share dimension");
    values.insert(values.end(), v.begin(), v.end());
  }
  std::vector<double> weights(samples.size(),
                              1.0 / static_cast<double>(samples.size()));
  return ValuationPrior(Kind::kSampled, types, std::move(values),
                        std::move(weights), std::move(label));
}

std::size_t ValuationPrior::draw_atom(Rng& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

Partition::Partition(std::vector<std::size_t> block_of)
    : block_of_(std::move(block_of)) {
  if (block_of_.empty()) throw InvalidInput("partition over an empty type set");
  block_count_ = *std::max_element(block_of_.begin(), block_of_.end()) + 1;
  members_.assign(block_count_, {});
  for (std::size_t t = 0; t < block_of_.size(); ++t) {
    members_[block_of_[t]].push_back(t);
  }
  for (const auto& m : members_) {
    if (m.empty()) {
      throw InvalidInput("partition block indices must be contiguous");
    }
  }
}

Partition Partition::full(std::size_t types) {
  std::vector<std::size_t> labels(types);
  std::iota(labels.begin(), labels.end(), 0);
  return Partition(std::move(labels));
}

Partition Partition::null(std::size_t types) {
  return Partition(std::vector<std::size_t>(types, 0));
}

bool is_refinement(const Partition& p1, const Partition& p2) {
  if (p1.type_count() != p2.type_count()) {
    throw InvalidInput("partitions are over different type sets");
  }
  for (std::size_t b = 0; b < p1.block_count(); ++b) {
    const auto& m = p1.members(b);
    const std::size_t target = p2.block_of(m.front());
    for (std::size_t t : m) {
      if (p2.block_of(t) != target) return false;
    }
  }
  return true;
}

std::vector<Partition> enumerate_partitions(std::size_t types) {
  std::vector<Partition> out;
  if (types == 0) return out;
  std::vector<std::size_t> rgs(types, 0);
  // Restricted growth strings: rgs[i] <= 1 + max(rgs[0..i-1]).
  while (true) {
    out.emplace_back(rgs);
    std::size_t i = types;
    bool advanced = false;
    while (i-- > 1) {
      const std::size_t prefix_max =
          *std::max_element(rgs.begin(), rgs.begin() + static_cast<std::ptrdiff_t>(i));
      if (rgs[i] <= prefix_max) {
        ++rgs[i];
        std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
        advanced = true;
        break;
      }
    }
    if (!advanced) return out;
  }
}

Regime::Regime(Partition info_partition, Partition disc_partition)
    : info(std::move(info_partition)), disc(std::move(disc_partition)) {
  if (info.type_count() != disc.type_count()) {
    throw RegimeError("information and disclosure partitions differ in T");
  }
  if (!is_refinement(info, disc)) {
    throw RegimeError(
        "infeasible regime: disclosure is finer than the information partition");
  }
}

Regime Regime::full_info_null_disclosure(std::size_t types) {
  return Regime(Partition::full(types), Partition::null(types));
}

namespace {
std::string describe_partition(const Partition& p) {
  std::ostringstream os;
  os << '{';
  for (std::size_t b = 0; b < p.block_count(); ++b) {
    if (b) os << ',';
    os << '{';
    const auto& m = p.members(b);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i) os << ',';
      os << m[i] + 1;
    }
    os << '}';
  }
  os << '}';
  return os.str();
}
}  // namespace

std::string Regime::describe() const {
  return "info=" + describe_partition(info) + " disc=" + describe_partition(disc);
}

AuctionEnvironment::AuctionEnvironment(InventoryDistribution inventory,
                                       CtrModel ctr,
                                       std::vector<PriorPtr> priors)
    : inventory_(std::move(inventory)),
      ctr_(std::move(ctr)),
      priors_(std::move(priors)) {
  if (ctr_.type_count() != inventory_.size()) {
    throw InvalidInput("type effects do not match the inventory distribution");
  }
  if (ctr_.advertiser_count() != priors_.size()) {
    throw InvalidInput("one quality effect per advertiser required");
  }
  for (const auto& prior : priors_) {
    if (!prior) throw InvalidInput("missing valuation prior");
    if (prior->type_count() != inventory_.size()) {
      throw InvalidInput("valuation prior dimension does not match T");
    }
  }
}

std::vector<double> AuctionEnvironment::utility_weights() const {
  std::vector<double> w(type_count());
  for (std::size_t t = 0; t < w.size(); ++t) w[t] = inventory_[t] * ctr_.beta(t);
  return w;
}

double block_value(const AuctionEnvironment& env, std::span<const double> v,
                   std::span<const std::size_t> members) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t : members) {
    const double w = env.inventory()[t] * env.ctr().beta(t);
    num += w * v[t];
    den += w;
  }
  if (den <= 0.0) {
    // Zero-probability block: plain average keeps the value well defined.
    double s = 0.0;
    for (std::size_t t : members) s += v[t];
    return s / static_cast<double>(members.size());
  }
  return num / den;
}

CoarsenedEnvironment coarsen_environment(const AuctionEnvironment& env,
                                         const Regime& regime) {
  const Partition& info = regime.info;
  if (info.type_count() != env.type_count()) {
    throw InvalidInput("regime partitions do not match the environment's T");
  }
  const std::size_t blocks = info.block_count();
  std::vector<double> probs(blocks, 0.0);
  std::vector<double> betas(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    double mass = 0.0;
    double ctr_mass = 0.0;
    for (std::size_t t : info.members(b)) {
      mass += env.inventory()[t];
      ctr_mass += env.inventory()[t] * env.ctr().beta(t);
    }
    probs[b] = mass;
    betas[b] = mass > 0.0 ? ctr_mass / mass : env.ctr().beta(info.members(b).front());
  }
  // Coarsen each distinct prior once so shared priors stay shared.
  std::vector<PriorPtr> coarse;
  std::vector<std::pair<const ValuationPrior*, PriorPtr>> seen;
  for (const auto& prior : env.priors()) {
    auto hit = std::find_if(seen.begin(), seen.end(),
                            [&](const auto& e) { return e.first == prior.get(); });
    if (hit != seen.end()) {
      coarse.push_back(hit->second);
      continue;
    }
    std::vector<std::vector<double>> atoms(prior->atom_count(),
                                           std::vector<double>(blocks));
    for (std::size_t i = 0; i < prior->atom_count(); ++i) {
      for (std::size_t b = 0; b < blocks; ++b) {
        atoms[i][b] = block_value(env, prior->atom(i), info.members(b));
      }
    }
    std::vector<double> w(prior->weights().begin(), prior->weights().end());
    auto ptr = std::make_shared<const ValuationPrior>(
        prior->kind() == ValuationPrior::Kind::kDiscrete
            ? ValuationPrior::discrete(atoms, std::move(w), prior->label())
            : ValuationPrior::from_samples(atoms, prior->label()));
    seen.emplace_back(prior.get(), ptr);
    coarse.push_back(ptr);
  }
  std::vector<std::size_t> disc_labels(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    disc_labels[b] = regime.disc.block_of(info.members(b).front());
  }
  // Relabel to contiguous indices in order of first appearance.
  std::vector<std::size_t> remap(regime.disc.block_count(), SIZE_MAX);
  std::size_t next = 0;
  for (auto& l : disc_labels) {
    if (remap[l] == SIZE_MAX) remap[l] = next++;
    l = remap[l];
  }
  std::vector<double> alpha(env.ctr().slot_effects().begin(),
                            env.ctr().slot_effects().end());
  std::vector<double> gamma(env.ctr().advertiser_quality().begin(),
                            env.ctr().advertiser_quality().end());
  double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (auto& p : probs) p /= total;
  AuctionEnvironment coarse_env(
      InventoryDistribution(std::move(probs)),
      CtrModel::unnormalized(std::move(alpha), std::move(betas), std::move(gamma)),
      std::move(coarse));
  std::vector<std::size_t> block_of_type(info.labels().begin(), info.labels().end());
  return CoarsenedEnvironment{std::move(coarse_env),
                              Partition(std::move(disc_labels)),
                              std::move(block_of_type)};
}

AuctionInstance sample_auction(const AuctionEnvironment& env,
                               std::uint64_t seed,
                               const Participation& participation) {
  Rng rng(seed);
  AuctionInstance inst;
  inst.seed = seed;
  const auto probs = env.inventory().probs();
  double u = uniform01(rng);
  inst.type = probs.size() - 1;
  double acc = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    acc += probs[t];
    if (u < acc) {
      inst.type = t;
      break;
    }
  }
  // Zero-probability tail types are never selected.
  while (probs[inst.type] <= 0.0 && inst.type > 0) --inst.type;
  const std::size_t A = env.advertiser_count();
  inst.atom.resize(A);
  for (std::size_t a = 0; a < A; ++a) inst.atom[a] = env.prior(a).draw_atom(rng);
  if (participation.everyone() || A == 0) {
    inst.participants.resize(A);
    std::iota(inst.participants.begin(), inst.participants.end(), 0);
    return inst;
  }
  const std::size_t lo = std::min(std::max<std::size_t>(participation.min_count, 1), A);
  const std::size_t hi = std::min(std::max(participation.max_count, lo), A);
  const std::size_t k = lo + uniform_index(rng, hi - lo + 1);
  std::vector<std::size_t> order(A);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + uniform_index(rng, A - i);
    std::swap(order[i], order[j]);
  }
  order.resize(k);
  std::sort(order.begin(), order.end());
  inst.participants = std::move(order);
  return inst;
}

}  // namespace ibpa
