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

#include "ibpa/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ibpa/isotonic.hpp"
#include "ibpa/ranking.hpp"

namespace ibpa {

ChoiceTable::ChoiceTable(const RevenueCurve& curve, const ValuationPrior& prior,
                         const InventoryDistribution& p, std::span<const double> beta)
    : vertices_(curve.vertices().size()),
      atoms_(prior.atom_count()),
      types_(p.size()) {
  std::vector<double> w(types_);
  for (std::size_t t = 0; t < types_; ++t) w[t] = p[t] * beta[t];
  alloc_.resize(vertices_ * atoms_ * types_);
  payment_.resize(vertices_ * atoms_);
  mass_.resize(vertices_ * atoms_);
  for (std::size_t v = 0; v < vertices_; ++v) {
    const Menu& menu = curve.vertex_menu(v);
    for (std::size_t i = 0; i < atoms_; ++i) {
      const auto c = advertiser_choice(menu, prior.atom(i), w);
      const std::size_t k = v * atoms_ + i;
      std::copy(c.alloc.begin(), c.alloc.end(), alloc_.begin() + static_cast<std::ptrdiff_t>(k * types_));
      payment_[k] = c.payment;
      double m = 0.0;
      for (std::size_t t = 0; t < types_; ++t) m += p[t] * c.alloc[t];
      mass_[k] = m;
    }
  }
}

bool ChoiceTable::deterministic(std::size_t t) const {
  for (std::size_t k = 0; k < vertices_ * atoms_; ++k) {
    const double x = alloc_[k * types_ + t];
    if (x != 0.0 && x != 1.0) return false;
  }
  return true;
}

MixedChoice mixed_choice(const RevenueCurve& curve, const ChoiceTable& table,
                         double q, std::size_t atom, std::size_t t) {
  const MenuBracket b = curve.bracket(q);
  const double wl = b.weight_lo;
  const double wh = 1.0 - wl;
  MixedChoice c;
  c.alloc_t = wl * table.alloc(b.lo, atom)[t] + wh * table.alloc(b.hi, atom)[t];
  c.mass = wl * table.mass(b.lo, atom) + wh * table.mass(b.hi, atom);
  c.payment = wl * table.payment(b.lo, atom) + wh * table.payment(b.hi, atom);
  return c;
}

MrAllocationProfile estimate_mr_profile(const CompetitionModel& model,
                                        std::size_t advertiser,
                                        std::span<const double> grid,
                                        std::size_t mc_samples, std::uint64_t seed) {
  const std::size_t A = model.curves.size();
  const std::size_t G = grid.size();
  if (advertiser >= A) throw InvalidInput("advertiser index out of range");
  if (mc_samples == 0) throw InvalidInput("need at least one Monte Carlo sample");
  const RevenueCurve& own = *model.curves[advertiser];
  std::vector<double> own_mr(G);
  for (std::size_t g = 0; g < G; ++g) own_mr[g] = model.gamma[advertiser] * own.marginal(grid[g]);

  Rng rng(seed);
  std::vector<double> wins(G, 0.0);
  std::vector<std::size_t> pool(A);
  const Participation& part = model.participation;
  for (std::size_t s = 0; s < mc_samples; ++s) {
    // Opponents present in this draw, conditional on the advertiser taking part.
    std::vector<std::size_t> present;
    if (part.everyone()) {
      for (std::size_t b = 0; b < A; ++b) {
        if (b != advertiser) present.push_back(b);
      }
    } else {
      const std::size_t lo = std::min(std::max<std::size_t>(part.min_count, 1), A);
      const std::size_t hi = std::min(std::max(part.max_count, lo), A);
      while (true) {
        const std::size_t k = lo + uniform_index(rng, hi - lo + 1);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, A - i)]);
        if (std::find(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), advertiser) ==
            pool.begin() + static_cast<std::ptrdiff_t>(k)) {
          continue;
        }
        for (std::size_t i = 0; i < k; ++i) {
          if (pool[i] != advertiser) present.push_back(pool[i]);
        }
        break;
      }
    }
    RankKey best{0.0, 1.0, std::numeric_limits<std::size_t>::max()};
    bool any = false;
    for (std::size_t b : present) {
      const double u = uniform01(rng);
      RankKey key{model.gamma[b] * model.curves[b]->marginal(u), u, b};
      if (key.mr <= 0.0) continue;
      if (!any || ranks_above(key, best)) {
        best = key;
        any = true;
      }
    }
    for (std::size_t g = 0; g < G; ++g) {
      if (own_mr[g] <= 0.0) continue;
      if (!any || ranks_above(RankKey{own_mr[g], grid[g], advertiser}, best)) wins[g] += 1.0;
    }
  }
  MrAllocationProfile prof;
  prof.grid.assign(grid.begin(), grid.end());
  prof.raw.resize(G);
  for (std::size_t g = 0; g < G; ++g) prof.raw[g] = wins[g] / static_cast<double>(mc_samples);
  for (std::size_t g = 1; g < G; ++g) {
    const double inc = prof.raw[g] - prof.raw[g - 1];
    const double var = (prof.raw[g] * (1 - prof.raw[g]) + prof.raw[g - 1] * (1 - prof.raw[g - 1])) /
                       static_cast<double>(mc_samples);
    if (inc > 3.0 * std::sqrt(var) && inc > 0.0) ++prof.violations;
  }
  auto iso = isotonic_nonincreasing(prof.raw);
  const double top = iso.front();
  const double bottom = iso.back();
  prof.x.resize(G);
  if (top - bottom <= 1e-12) {
    prof.degenerate = true;
    for (std::size_t g = 0; g < G; ++g) prof.x[g] = g == 0 ? 1.0 : 0.0;
  } else {
    for (std::size_t g = 0; g < G; ++g) prof.x[g] = (iso[g] - bottom) / (top - bottom);
  }
  prof.x.front() = 1.0;
  prof.x.back() = 0.0;
  return prof;
}

QuantileMapper::QuantileMapper(QuantileMode mode, std::vector<double> strength,
                               std::span<const double> weights, std::vector<double> seg_lo,
                               std::vector<double> seg_hi)
    : mode_(mode),
      strength_(std::move(strength)),
      seg_lo_(std::move(seg_lo)),
      seg_hi_(std::move(seg_hi)) {
  const std::size_t N = strength_.size();
  if (weights.size() != N) throw InvalidInput("mapper weights and atoms differ");
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return strength_[a] > strength_[b]; });
  lo_.assign(N, 0.0);
  width_.assign(N, 0.0);
  double acc = 0.0;
  std::size_t i = 0;
  while (i < N) {
    // Group near-equal strengths into one tie band.
    std::size_t j = i + 1;
    const double s0 = strength_[order[i]];
    const double tol = 1e-12 * std::max(1.0, std::abs(s0));
    while (j < N && s0 - strength_[order[j]] <= tol) ++j;
    double w = 0.0;
    for (std::size_t k = i; k < j; ++k) w += weights[order[k]];
    for (std::size_t k = i; k < j; ++k) {
      lo_[order[k]] = acc;
      width_[order[k]] = w;
    }
    acc += w;
    i = j;
  }
}

QuantileMapper QuantileMapper::thresholds(std::vector<double> q, std::vector<double> alloc,
                                          double saturation) {
  const std::size_t V = q.size();
  if (V == 0 || alloc.size() % V != 0) throw InvalidInput("threshold table is not atoms x caps");
  const std::size_t N = alloc.size() / V;
  QuantileMapper m;
  m.mode_ = QuantileMode::kNested;
  m.strength_.assign(N, 0.0);
  m.lo_.assign(N, saturation);
  m.width_.assign(N, 1.0 - saturation);
  for (std::size_t i = 0; i < N; ++i) {
    const double* x = &alloc[i * V];
    const auto first = std::find_if(x, x + V, [](double a) { return a > 0.0; });
    if (first == x + V) continue;
    const std::size_t v0 = static_cast<std::size_t>(first - x);
    const std::size_t v1 = static_cast<std::size_t>(std::max_element(x, x + V) - x);
    m.lo_[i] = v0 > 0 ? q[v0 - 1] : q[0];
    m.width_[i] = q[v1] - m.lo_[i];
    m.strength_[i] = x[V - 1];
  }
  m.thr_q_ = std::move(q);
  m.thr_alloc_ = std::move(alloc);
  m.saturation_ = saturation;
  return m;
}

double QuantileMapper::map(std::size_t atom, Rng& rng) const {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  if (!thr_q_.empty()) {
    const std::size_t V = thr_q_.size();
    const double* x = &thr_alloc_[atom * V];
    for (std::size_t v = 0; v < V; ++v) {
      if (x[v] < u1) continue;
      if (v == 0) return thr_q_[0];
      // Allocation is linear in q between vertices.
      const double f = (u1 - x[v - 1]) / (x[v] - x[v - 1]);
      return thr_q_[v - 1] + f * (thr_q_[v] - thr_q_[v - 1]);
    }
    return saturation_ < 1.0 ? saturation_ + u2 * (1.0 - saturation_) : 1.0;
  }
  double q = std::min(lo_[atom] + u1 * width_[atom], 1.0);
  auto it = std::upper_bound(seg_hi_.begin(), seg_hi_.end(), q);
  if (it == seg_hi_.end()) return q;
  const std::size_t g = static_cast<std::size_t>(it - seg_hi_.begin());
  if (q < seg_lo_[g]) return q;
  return seg_lo_[g] + u2 * (seg_hi_[g] - seg_lo_[g]);
}

namespace {

void segment_bounds(const RevenueCurve& curve, std::vector<double>& lo,
                    std::vector<double>& hi) {
  for (const auto& s : curve.segments()) {
    lo.push_back(s.q_lo);
    hi.push_back(s.q_hi);
  }
}

}  // namespace

QuantileMapper build_nested_mapper(const RevenueCurve& curve, const ChoiceTable& table,
                                   const ValuationPrior& prior, std::size_t t) {
  const std::size_t N = prior.atom_count();
  const auto verts = curve.vertices();
  const std::size_t V = verts.size();
  std::vector<double> q(V), alloc(N * V);
  for (std::size_t v = 0; v < V; ++v) q[v] = verts[v].q;
  for (std::size_t i = 0; i < N; ++i) {
    // Once served at some cap, an atom counts as served at every larger one.
    double run = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      run = std::max(run, std::clamp(table.alloc(v, i)[t], 0.0, 1.0));
      alloc[i * V + v] = run;
    }
  }
  return QuantileMapper::thresholds(std::move(q), std::move(alloc), curve.saturation());
}

QuantileMapper build_interim_mapper(const RevenueCurve& curve, const ChoiceTable& table,
                                    const ValuationPrior& prior, std::size_t t,
                                    const MrAllocationProfile& profile) {
  const std::size_t N = prior.atom_count();
  const auto& grid = profile.grid;
  std::vector<double> strength(N, 0.0);
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double mass = profile.x[g] - profile.x[g + 1];
    if (mass <= 0.0) continue;
    const double mid = 0.5 * (grid[g] + grid[g + 1]);
    for (std::size_t i = 0; i < N; ++i) {
      strength[i] += mass * mixed_choice(curve, table, mid, i, t).alloc_t;
    }
  }
  std::vector<double> lo, hi;
  segment_bounds(curve, lo, hi);
  return QuantileMapper(QuantileMode::kInterim, std::move(strength), prior.weights(),
                        std::move(lo), std::move(hi));
}

QuantileMapper build_mapper(const RevenueCurve& curve, const ChoiceTable& table,
                            const ValuationPrior& prior, std::size_t t,
                            const MrAllocationProfile* profile) {
  if (profile == nullptr || table.deterministic(t)) {
    return build_nested_mapper(curve, table, prior, t);
  }
  if (profile->degenerate) {
    // No usable interim profile: rank by allocation at every vertex equally.
    const std::size_t N = prior.atom_count();
    std::vector<double> strength(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t v = 0; v < table.vertex_count(); ++v) strength[i] += table.alloc(v, i)[t];
    }
    std::vector<double> lo, hi;
    segment_bounds(curve, lo, hi);
    return QuantileMapper(QuantileMode::kInterim, std::move(strength), prior.weights(),
                          std::move(lo), std::move(hi));
  }
  return build_interim_mapper(curve, table, prior, t, *profile);
}

std::size_t nearest_atom(const ValuationPrior& prior, std::span<const double> v,
                         std::span<const double> weights) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prior.atom_count(); ++i) {
    double d = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
      const double diff = v[t] - prior.value(i, t);
      d += weights[t] * diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace ibpa
