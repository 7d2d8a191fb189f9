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

#include "ibpa/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace ibpa {

namespace {

constexpr double kFeasibilitySlack = 1e-9;

struct Eval {
  double revenue = 0.0;
  double alloc = 0.0;
};

// The single-advertiser problem in genome form.
class Problem {
 public:
  Problem(const ValuationPrior& prior, const InventoryDistribution& p,
          std::span<const double> beta, double q, MenuClass cls,
          const SolverConfig& cfg)
      : prior_(prior), p_(p.probs().begin(), p.probs().end()),
        beta_(beta.begin(), beta.end()), q_(q), cls_(cls), cfg_(cfg),
        N_(prior.atom_count()), T_(p.size()) {
    w_.resize(T_);
    for (std::size_t t = 0; t < T_; ++t) w_[t] = p_[t] * beta_[t];
    e_.resize(N_ * T_);
    umax_ = 0.0;
    for (std::size_t i = 0; i < N_; ++i) {
      double g = 0.0;
      for (std::size_t t = 0; t < T_; ++t) {
        e_[i * T_ + t] = w_[t] * prior.value(i, t);
        g += e_[i * T_ + t];
      }
      umax_ = std::max(umax_, g);
    }
    price_hi_ = 1.01 * umax_;
    switch (cls_) {
      case MenuClass::kFull:
        dim_ = cfg_.max_items * (T_ + 1);
        lo_.assign(dim_, 0.0);
        hi_.assign(dim_, 1.0);
        for (std::size_t k = 0; k < cfg_.max_items; ++k) hi_[k * (T_ + 1) + T_] = price_hi_;
        break;
      case MenuClass::kBinary: {
        if (T_ > 12) throw InvalidInput("binary menus support at most 12 types");
        bundles_ = (std::size_t{1} << T_) - 1;
        dim_ = bundles_;
        lo_.assign(dim_, 0.0);
        hi_.assign(dim_, price_hi_);
        bundle_mass_.assign(bundles_ + 1, 0.0);
        for (std::size_t b = 1; b <= bundles_; ++b) {
          const std::size_t low = static_cast<std::size_t>(std::countr_zero(b));
          bundle_mass_[b] = bundle_mass_[b & (b - 1)] + p_[low];
        }
        if (N_ * (bundles_ + 1) <= (std::size_t{1} << 23)) {
          bundle_value_.assign(N_ * (bundles_ + 1), 0.0);
          for (std::size_t i = 0; i < N_; ++i) fill_bundle_values(i, &bundle_value_[i * (bundles_ + 1)]);
        }
        break;
      }
      case MenuClass::kAdditive:
        dim_ = T_ + 1;
        lo_.assign(dim_, 0.0);
        hi_.assign(dim_, price_hi_);
        for (std::size_t t = 0; t < T_; ++t) {
          double m = 0.0;
          if (p_[t] > 0.0) {
            for (std::size_t i = 0; i < N_; ++i) m = std::max(m, e_[i * T_ + t] / p_[t]);
          }
          hi_[t + 1] = m > 0.0 ? 1.01 * m : 1.0;
        }
        break;
    }
  }

  std::size_t dim() const { return dim_; }
  double lo(std::size_t j) const { return lo_[j]; }
  double hi(std::size_t j) const { return hi_[j]; }
  double scale() const { return umax_; }
  double cap() const { return q_; }

  double fitness(const Eval& ev) const {
    return ev.revenue -
           cfg_.penalty_weight * umax_ * std::max(0.0, ev.alloc - q_);
  }
  bool feasible(const Eval& ev) const { return ev.alloc <= q_ + kFeasibilitySlack; }

  Eval evaluate(std::span<const double> g) const {
    Eval ev;
    switch (cls_) {
      case MenuClass::kFull: eval_full(g, ev); break;
      case MenuClass::kBinary: eval_binary(g, ev); break;
      case MenuClass::kAdditive: eval_additive(g, ev); break;
    }
    return ev;
  }

  // Menu for a genome; items nobody picks are dropped (choices unchanged).
  Menu decode(std::span<const double> g) const {
    switch (cls_) {
      case MenuClass::kFull: {
        std::vector<LotteryPricing> items;
        for (std::size_t k = 0; k < cfg_.max_items; ++k) {
          const double* it = g.data() + k * (T_ + 1);
          items.push_back({std::vector<double>(it, it + T_), it[T_]});
        }
        return compact(Menu::explicit_items(MenuClass::kFull, T_, std::move(items)));
      }
      case MenuClass::kBinary: {
        std::vector<char> used(bundles_ + 1, 0);
        std::vector<double> bv(bundles_ + 1);
        for (std::size_t i = 0; i < N_; ++i) used[choose_bundle(g, i, bv)] = 1;
        std::vector<LotteryPricing> items;
        for (std::size_t b = 1; b <= bundles_; ++b) {
          if (!used[b]) continue;
          LotteryPricing lp{std::vector<double>(T_, 0.0), g[b - 1]};
          for (std::size_t t = 0; t < T_; ++t) lp.alloc[t] = (b >> t) & 1 ? 1.0 : 0.0;
          items.push_back(std::move(lp));
        }
        return Menu::explicit_items(MenuClass::kBinary, T_, std::move(items));
      }
      case MenuClass::kAdditive:
        return Menu::additive(p_, g[0], std::vector<double>(g.begin() + 1, g.end()));
    }
    return Menu::null(T_, cls_);
  }

  // Genome reproducing a menu's behaviour, or empty when cls cannot express it.
  std::vector<double> encode(const Menu& menu) const {
    if (menu.type_count() != T_) return {};
    switch (cls_) {
      case MenuClass::kAdditive: {
        if (!menu.is_additive() || !std::isfinite(menu.additive_prices().rho0)) return {};
        std::vector<double> g{menu.additive_prices().rho0};
        const auto& rho = menu.additive_prices().rho;
        g.insert(g.end(), rho.begin(), rho.end());
        return clip(std::move(g));
      }
      case MenuClass::kBinary: {
        std::vector<double> g(dim_, price_hi_);
        if (menu.is_additive()) {
          const auto& pr = menu.additive_prices();
          if (!std::isfinite(pr.rho0)) return g;
          for (std::size_t b = 1; b <= bundles_; ++b) {
            double price = pr.rho0;
            for (std::size_t t = 0; t < T_; ++t) {
              if ((b >> t) & 1) price += p_[t] * pr.rho[t];
            }
            g[b - 1] = price;
          }
          return clip(std::move(g));
        }
        for (const auto& it : menu.items()) {
          std::size_t b = 0;
          for (std::size_t t = 0; t < T_; ++t) {
            if (it.alloc[t] == 1.0) {
              b |= std::size_t{1} << t;
            } else if (it.alloc[t] != 0.0) {
              return {};
            }
          }
          if (b == 0) continue;
          g[b - 1] = std::min(g[b - 1], it.payment);
        }
        return clip(std::move(g));
      }
      case MenuClass::kFull: {
        // Keep the max_items most popular choices.
        std::unordered_map<std::string, std::pair<double, LotteryPricing>> picked;
        for (std::size_t i = 0; i < N_; ++i) {
          auto c = advertiser_choice(menu, prior_.atom(i), w_);
          if (c.index == 0) continue;
          std::string key(reinterpret_cast<const char*>(c.alloc.data()),
                          c.alloc.size() * sizeof(double));
          key.append(reinterpret_cast<const char*>(&c.payment), sizeof(double));
          auto& slot = picked[key];
          slot.first += prior_.weight(i);
          slot.second = LotteryPricing{c.alloc, c.payment};
        }
        std::vector<std::pair<double, LotteryPricing>> ranked;
        for (auto& kv : picked) ranked.push_back(std::move(kv.second));
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first > b.first;
          return a.second.payment > b.second.payment;
        });
        std::vector<double> g(dim_, 0.0);
        for (std::size_t k = 0; k < cfg_.max_items; ++k) {
          double* it = g.data() + k * (T_ + 1);
          if (k < ranked.size()) {
            std::copy(ranked[k].second.alloc.begin(), ranked[k].second.alloc.end(), it);
            it[T_] = ranked[k].second.payment;
          } else {
            it[T_] = price_hi_;  // inert item
          }
        }
        return clip(std::move(g));
      }
    }
    return {};
  }

  // Scales every lottery by lambda; only meaningful for the full class.
  std::vector<double> shrink(std::span<const double> g, double lambda) const {
    std::vector<double> out(g.begin(), g.end());
    for (auto& x : out) x *= lambda;
    return out;
  }

  std::vector<double> clip(std::vector<double> g) const {
    for (std::size_t j = 0; j < dim_; ++j) g[j] = std::clamp(g[j], lo_[j], hi_[j]);
    return g;
  }

  // Heuristic starting points: grand bundle and separate posted prices.
  std::vector<Menu> heuristic_seeds() const {
    std::vector<Menu> seeds;
    seeds.push_back(grand_bundle_seed());
    seeds.push_back(separate_prices_seed());
    if (cls_ == MenuClass::kFull) seeds.push_back(greedy_fill_seed());
    return seeds;
  }

 private:
  void fill_bundle_values(std::size_t i, double* out) const {
    out[0] = 0.0;
    const double* e = &e_[i * T_];
    for (std::size_t b = 1; b <= bundles_; ++b) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(b));
      out[b] = out[b & (b - 1)] + e[low];
    }
  }

  std::size_t choose_bundle(std::span<const double> g, std::size_t i,
                            std::vector<double>& scratch) const {
    const double* bv;
    if (!bundle_value_.empty()) {
      bv = &bundle_value_[i * (bundles_ + 1)];
    } else {
      fill_bundle_values(i, scratch.data());
      bv = scratch.data();
    }
    std::size_t best = 0;
    double best_u = 0.0;
    double best_pay = 0.0;
    for (std::size_t b = 1; b <= bundles_; ++b) {
      if (detail::prefer(bv[b], g[b - 1], best_u, best_pay)) {
        best = b;
        best_u = bv[b] - g[b - 1];
        best_pay = g[b - 1];
      }
    }
    return best;
  }

  void eval_full(std::span<const double> g, Eval& ev) const {
    const std::size_t K = cfg_.max_items;
    mass_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double* it = g.data() + k * (T_ + 1);
      double m = 0.0;
      for (std::size_t t = 0; t < T_; ++t) m += p_[t] * it[t];
      mass_[k] = m;
    }
    for (std::size_t i = 0; i < N_; ++i) {
      const double* e = &e_[i * T_];
      std::size_t best = K;
      double best_u = 0.0;
      double best_pay = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double* it = g.data() + k * (T_ + 1);
        double value = 0.0;
        for (std::size_t t = 0; t < T_; ++t) value += e[t] * it[t];
        if (detail::prefer(value, it[T_], best_u, best_pay)) {
          best = k;
          best_u = value - it[T_];
          best_pay = it[T_];
        }
      }
      if (best < K) {
        ev.revenue += prior_.weight(i) * best_pay;
        ev.alloc += prior_.weight(i) * mass_[best];
      }
    }
  }

  void eval_binary(std::span<const double> g, Eval& ev) const {
    std::vector<double> scratch(bundle_value_.empty() ? bundles_ + 1 : 0);
    for (std::size_t i = 0; i < N_; ++i) {
      const std::size_t b = choose_bundle(g, i, scratch);
      if (b == 0) continue;
      ev.revenue += prior_.weight(i) * g[b - 1];
      ev.alloc += prior_.weight(i) * bundle_mass_[b];
    }
  }

  void eval_additive(std::span<const double> g, Eval& ev) const {
    const double rho0 = g[0];
    for (std::size_t i = 0; i < N_; ++i) {
      const double* e = &e_[i * T_];
      double surplus = 0.0;
      double pay = rho0;
      double mass = 0.0;
      bool large = false;
      bool any = false;
      for (std::size_t t = 0; t < T_; ++t) {
        if (p_[t] <= 0.0) continue;
        const double s = e[t] - p_[t] * g[t + 1];
        if (s >= 0.0) {
          surplus += s;
          pay += p_[t] * g[t + 1];
          mass += p_[t];
          any = true;
          if (s > rho0) large = true;
        }
      }
      if (large || (any && surplus - rho0 >= 0.0)) {
        ev.revenue += prior_.weight(i) * pay;
        ev.alloc += prior_.weight(i) * mass;
      }
    }
  }

  Menu compact(const Menu& menu) const {
    const auto st = menu_stats(menu, prior_, InventoryDistribution(p_), beta_);
    std::vector<LotteryPricing> kept;
    for (std::size_t k = 0; k < menu.items().size(); ++k) {
      if (st.choice_probs[k + 1] > 0.0) kept.push_back(menu.items()[k]);
    }
    return Menu::explicit_items(menu.menu_class(), T_, std::move(kept));
  }

  // Sorted (value, weight) pairs, descending by value.
  static std::vector<std::pair<double, double>> sorted_values(
      const std::vector<double>& vals, const ValuationPrior& prior) {
    std::vector<std::pair<double, double>> out(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) out[i] = {vals[i], prior.weight(i)};
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    return out;
  }

  // Best price P with revenue P * min(mass, cap) (lottery when mass > cap).
  static std::pair<double, double> best_price(
      const std::vector<std::pair<double, double>>& sorted, double cap, bool lottery) {
    double best_rev = 0.0;
    double best_p = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      mass += sorted[i].second;
      if (i + 1 < sorted.size() && sorted[i + 1].first == sorted[i].first) continue;
      const double price = sorted[i].first;
      double rev;
      if (mass <= cap + kFeasibilitySlack) {
        rev = price * mass;
      } else if (lottery) {
        rev = price * cap;
      } else {
        break;
      }
      if (rev > best_rev) {
        best_rev = rev;
        best_p = price;
      }
    }
    return {best_p, best_rev};
  }

  Menu grand_bundle_seed() const {
    std::vector<double> g(N_);
    for (std::size_t i = 0; i < N_; ++i) {
      g[i] = std::accumulate(&e_[i * T_], &e_[i * T_] + T_, 0.0);
    }
    const double unit = std::accumulate(p_.begin(), p_.end(), 0.0);
    const double cap = unit > 0.0 ? q_ / unit : 0.0;
    auto sorted = sorted_values(g, prior_);
    const bool lottery = cls_ == MenuClass::kFull;
    auto [price, rev] = best_price(sorted, cap, lottery);
    if (rev <= 0.0) return Menu::null(T_, cls_);
    if (cls_ == MenuClass::kAdditive) {
      return Menu::additive(p_, price, std::vector<double>(T_, 0.0));
    }
    double mass = 0.0;
    for (const auto& [v, w] : sorted) if (v >= price) mass += w;
    const double lambda = lottery ? std::min(1.0, cap / mass) : 1.0;
    std::vector<double> alloc(T_, 0.0);
    for (std::size_t t = 0; t < T_; ++t) alloc[t] = p_[t] > 0.0 ? lambda : 0.0;
    return Menu::explicit_items(cls_, T_, {LotteryPricing{alloc, lambda * price}});
  }

  // One item per sampled atom: fill the cap with that atom's most valuable
  // types (per unit of mass) and charge its full value.
  Menu greedy_fill_seed() const {
    std::vector<std::size_t> rank(N_);
    std::iota(rank.begin(), rank.end(), 0);
    std::vector<double> total(N_);
    for (std::size_t i = 0; i < N_; ++i) {
      total[i] = std::accumulate(&e_[i * T_], &e_[i * T_] + T_, 0.0);
    }
    std::sort(rank.begin(), rank.end(), [&](auto a, auto b) { return total[a] > total[b]; });
    const std::size_t K = std::min(cfg_.max_items, N_);
    std::vector<LotteryPricing> items;
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t i = rank[k * N_ / K];
      const double* e = &e_[i * T_];
      std::vector<std::size_t> order;
      for (std::size_t t = 0; t < T_; ++t) {
        if (p_[t] > 0.0 && e[t] > 0.0) order.push_back(t);
      }
      std::sort(order.begin(), order.end(),
                [&](auto a, auto b) { return e[a] / p_[a] > e[b] / p_[b]; });
      LotteryPricing it{std::vector<double>(T_, 0.0), 0.0};
      double left = q_;
      for (std::size_t t : order) {
        if (left <= 0.0) break;
        it.alloc[t] = std::min(1.0, left / p_[t]);
        left -= it.alloc[t] * p_[t];
        it.payment += it.alloc[t] * e[t];
      }
      if (it.payment > 0.0) items.push_back(std::move(it));
    }
    return Menu::explicit_items(MenuClass::kFull, T_, std::move(items));
  }

  Menu separate_prices_seed() const {
    std::vector<double> rho(T_, 0.0);
    for (std::size_t t = 0; t < T_; ++t) {
      if (p_[t] <= 0.0) continue;
      std::vector<double> x(N_);
      for (std::size_t i = 0; i < N_; ++i) x[i] = e_[i * T_ + t] / p_[t];
      auto [price, rev] = best_price(sorted_values(x, prior_), q_, false);
      // Unsellable types get a price above every valuation.
      rho[t] = rev > 0.0 ? price : 1.01 * *std::max_element(x.begin(), x.end()) + 1.0;
    }
    return Menu::additive(p_, 0.0, std::move(rho));
  }

  const ValuationPrior& prior_;
  std::vector<double> p_;
  std::vector<double> beta_;
  double q_;
  MenuClass cls_;
  const SolverConfig& cfg_;
  std::size_t N_;
  std::size_t T_;
  std::vector<double> w_;
  std::vector<double> e_;  // w_t v_it, row-major
  double umax_ = 0.0;
  double price_hi_ = 0.0;
  std::size_t dim_ = 0;
  std::vector<double> lo_, hi_;
  std::size_t bundles_ = 0;
  std::vector<double> bundle_mass_;
  std::vector<double> bundle_value_;
  mutable std::vector<double> mass_;
};

struct Individual {
  std::vector<double> genome;
  double fitness = 0.0;
};

class Search {
 public:
  Search(const Problem& prob, const SolverConfig& cfg)
      : prob_(prob), cfg_(cfg), rng_(cfg.seed) {}

  double score(const std::vector<double>& g) {
    const Eval ev = prob_.evaluate(g);
    const double f = prob_.fitness(ev);
    if (prob_.feasible(ev) &&
        (!have_feasible_ || ev.revenue > best_feasible_rev_)) {
      have_feasible_ = true;
      best_feasible_rev_ = ev.revenue;
      best_feasible_ = g;
    }
    return f;
  }

  bool run(const std::vector<std::vector<double>>& seeds) {
    const std::size_t D = prob_.dim();
    const std::size_t P = std::max<std::size_t>(cfg_.population, 2);
    std::vector<Individual> pop;
    pop.reserve(P);
    for (const auto& s : seeds) {
      if (pop.size() >= P) break;
      pop.push_back({s, score(s)});
    }
    // Perturbed copies of the seeds, then uniform random genomes.
    const std::size_t n_seeds = pop.size();
    while (pop.size() < P) {
      std::vector<double> g(D);
      if (n_seeds > 0 && pop.size() < P / 2) {
        g = pop[uniform_index(rng_, n_seeds)].genome;
        mutate(g);
      } else {
        for (std::size_t j = 0; j < D; ++j) {
          g[j] = prob_.lo(j) + uniform01(rng_) * (prob_.hi(j) - prob_.lo(j));
        }
      }
      const double f = score(g);
      pop.push_back({std::move(g), f});
    }
    auto by_fitness = [](const Individual& a, const Individual& b) {
      return a.fitness > b.fitness;
    };
    std::sort(pop.begin(), pop.end(), by_fitness);
    double best = pop.front().fitness;
    std::size_t stall = 0;
    bool converged = false;
    const double eps = 1e-12 * std::max(prob_.scale(), 1e-300);
    for (std::size_t gen = 0; gen < cfg_.max_generations; ++gen) {
      std::vector<Individual> next(pop.begin(),
                                   pop.begin() + std::min(cfg_.elites, pop.size()));
      std::vector<std::size_t> parents(std::max<std::size_t>(cfg_.parents, 2));
      for (auto& par : parents) {
        const std::size_t a = uniform_index(rng_, pop.size());
        const std::size_t b = uniform_index(rng_, pop.size());
        par = pop[a].fitness >= pop[b].fitness ? a : b;
      }
      while (next.size() < P) {
        const auto& p1 = pop[parents[uniform_index(rng_, parents.size())]].genome;
        const auto& p2 = pop[parents[uniform_index(rng_, parents.size())]].genome;
        std::vector<double> child = p1;
        if (uniform01(rng_) < cfg_.crossover_rate) {
          for (std::size_t j = 0; j < D; ++j) {
            const double lam = -0.25 + 1.5 * uniform01(rng_);
            child[j] = std::clamp(lam * p1[j] + (1.0 - lam) * p2[j], prob_.lo(j), prob_.hi(j));
          }
        }
        if (uniform01(rng_) < cfg_.mutation_rate) mutate(child);
        const double f = score(child);
        next.push_back({std::move(child), f});
      }
      pop = std::move(next);
      std::sort(pop.begin(), pop.end(), by_fitness);
      if (pop.front().fitness > best + eps) {
        best = pop.front().fitness;
        stall = 0;
      } else if (++stall >= cfg_.stall_generations) {
        converged = true;
        break;
      }
    }
    best_ = pop.front().genome;
    if (cfg_.polish) polish();
    return converged;
  }

  const std::vector<double>& best() const { return best_; }
  bool have_feasible() const { return have_feasible_; }
  const std::vector<double>& best_feasible() const { return best_feasible_; }
  double best_feasible_revenue() const { return best_feasible_rev_; }

 private:
  void mutate(std::vector<double>& g) {
    const std::size_t D = g.size();
    std::size_t count = 1;
    while (count < D && uniform01(rng_) < 0.5) ++count;
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t j = uniform_index(rng_, D);
      const double range = prob_.hi(j) - prob_.lo(j);
      if (uniform01(rng_) < 0.5) {
        g[j] = prob_.lo(j) + uniform01(rng_) * range;
      } else {
        g[j] += 0.1 * range * (uniform01(rng_) + uniform01(rng_) - 1.0);
      }
      g[j] = std::clamp(g[j], prob_.lo(j), prob_.hi(j));
    }
  }

  // Coordinate pattern search from the GA winner.
  void polish() {
    const std::size_t D = prob_.dim();
    std::vector<double> step(D);
    for (std::size_t j = 0; j < D; ++j) step[j] = 0.1 * (prob_.hi(j) - prob_.lo(j));
    std::vector<double> x = best_;
    double fx = score(x);
    std::size_t budget = std::min<std::size_t>(100 * D, 5000);
    while (budget > 0) {
      bool improved = false;
      for (std::size_t j = 0; j < D && budget > 0; ++j) {
        for (double dir : {1.0, -1.0}) {
          std::vector<double> y = x;
          y[j] = std::clamp(x[j] + dir * step[j], prob_.lo(j), prob_.hi(j));
          if (y[j] == x[j]) continue;
          --budget;
          const double fy = score(y);
          if (fy > fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        bool tiny = true;
        for (std::size_t j = 0; j < D; ++j) {
          step[j] *= 0.5;
          if (step[j] > 1e-7 * (prob_.hi(j) - prob_.lo(j))) tiny = false;
        }
        if (tiny) break;
      }
    }
    best_ = std::move(x);
  }

  const Problem& prob_;
  const SolverConfig& cfg_;
  Rng rng_;
  std::vector<double> best_;
  bool have_feasible_ = false;
  double best_feasible_rev_ = 0.0;
  std::vector<double> best_feasible_;
};

SolveResult finish(Menu menu, const ValuationPrior& prior,
                   const InventoryDistribution& p, std::span<const double> beta,
                   bool converged) {
  MenuStats st = menu_stats(menu, prior, p, beta);
  return SolveResult{std::move(menu), std::move(st), converged};
}

}  // namespace

SolveResult solve_single_type(const ValuationPrior& prior,
                              const InventoryDistribution& p,
                              std::span<const double> beta, double q,
                              MenuClass cls) {
  if (p.size() != 1) throw InvalidInput("single-type solver needs T = 1");
  const double w = p[0] * beta[0];
  // Posted-price points (mass, revenue) over distinct atom values.
  std::vector<std::pair<double, double>> vals(prior.atom_count());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = {w * prior.value(i, 0), prior.weight(i)};
  std::sort(vals.begin(), vals.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  struct Point {
    double mass, rev, price;
  };
  std::vector<Point> pts{{0.0, 0.0, 0.0}};
  double mass = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    mass += vals[i].second;
    if (i + 1 < vals.size() && vals[i + 1].first == vals[i].first) continue;
    if (vals[i].first <= 0.0) break;
    pts.push_back({mass * p[0], vals[i].first * mass, vals[i].first});
  }
  auto posted = [&](double price) {
    if (price <= 0.0) return Menu::null(1, cls);
    if (cls == MenuClass::kAdditive) return Menu::additive(p.probs(), price, {0.0});
    return Menu::explicit_items(cls, 1, {LotteryPricing{{1.0}, price}});
  };
  if (cls != MenuClass::kFull) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (pts[k].mass <= q + kFeasibilitySlack && pts[k].rev > pts[best].rev) best = k;
    }
    return finish(posted(pts[best].price), prior, p, beta, true);
  }
  // Upper concave hull of the posted-price points, cut at its peak.
  std::vector<Point> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.mass - a.mass) * (pt.rev - a.rev) - (b.rev - a.rev) * (pt.mass - a.mass);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  std::size_t peak = 0;
  for (std::size_t k = 1; k < hull.size(); ++k) {
    if (hull[k].rev > hull[peak].rev) peak = k;
  }
  hull.resize(peak + 1);
  if (hull.size() == 1) return finish(Menu::null(1, cls), prior, p, beta, true);
  if (q >= hull.back().mass) return finish(posted(hull.back().price), prior, p, beta, true);
  // Caps within rounding of a hull vertex get that vertex's posted price.
  constexpr double kSnap = 1e-9;
  std::size_t k = 1;
  while (hull[k].mass < q - kSnap) ++k;
  const Point& b = hull[k];
  const Point& a = hull[k - 1];
  if (b.mass <= q + kSnap) return finish(posted(b.price), prior, p, beta, true);
  if (k > 1 && a.mass >= q - kSnap) return finish(posted(a.price), prior, p, beta, true);
  const double lambda = (b.mass - q) / (b.mass - a.mass);  // weight on a
  if (k == 1) {
    // Mixing with the null mechanism.
    const double x = 1.0 - lambda;
    return finish(Menu::explicit_items(cls, 1, {LotteryPricing{{x}, x * b.price}}),
                  prior, p, beta, true);
  }
  std::vector<LotteryPricing> items{
      {{1.0}, lambda * a.price + (1.0 - lambda) * b.price},
      {{1.0 - lambda}, (1.0 - lambda) * b.price}};
  return finish(Menu::explicit_items(cls, 1, std::move(items)), prior, p, beta, true);
}

SolveResult solve_constrained(const ValuationPrior& prior,
                              const InventoryDistribution& p,
                              std::span<const double> beta, double q,
                              MenuClass cls, const SolverConfig& cfg,
                              std::span<const Menu> seeds) {
  if (!(q >= 0.0 && q <= 1.0 + 1e-12)) throw InvalidInput("cap q must lie in [0,1]");
  if (prior.type_count() != p.size() || beta.size() != p.size()) {
    throw InvalidInput("solver inputs disagree on the number of types");
  }
  const std::size_t T = p.size();
  if (q <= 0.0) return finish(Menu::null(T, cls), prior, p, beta, true);
  if (T == 1 && cfg.exact_single_type) return solve_single_type(prior, p, beta, q, cls);
  Problem prob(prior, p, beta, q, cls, cfg);
  if (prob.scale() <= 0.0) return finish(Menu::null(T, cls), prior, p, beta, true);

  std::vector<std::vector<double>> genomes;
  auto add = [&](const Menu& m) {
    auto g = prob.encode(m);
    if (!g.empty()) genomes.push_back(std::move(g));
  };
  for (const auto& m : seeds) add(m);
  for (const auto& m : prob.heuristic_seeds()) add(m);

  Search search(prob, cfg);
  const bool converged = search.run(genomes);
  std::vector<double> g = search.best();
  Eval ev = prob.evaluate(g);
  if (!prob.feasible(ev) && cls == MenuClass::kFull) {
    // Shrinking every lottery keeps choices and scales allocation and revenue.
    g = prob.shrink(g, q / ev.alloc);
    ev = prob.evaluate(g);
  }
  if (!prob.feasible(ev) ||
      (search.have_feasible() && search.best_feasible_revenue() > ev.revenue)) {
    if (search.have_feasible()) {
      g = search.best_feasible();
    } else {
      return finish(Menu::null(T, cls), prior, p, beta, converged);
    }
  }
  return finish(prob.decode(g), prior, p, beta, converged);
}

}  // namespace ibpa
