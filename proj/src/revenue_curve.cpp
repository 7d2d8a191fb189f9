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

#include "ibpa/revenue_curve.hpp"

#include <algorithm>
#include <cmath>

#include "ibpa/isotonic.hpp"

namespace ibpa {

namespace {

struct Envelope {
  std::vector<double> values;
  std::vector<std::size_t> source;  // grid index whose menu attains the running max
  std::vector<double> slopes;       // per grid interval, non-increasing
};

Envelope make_envelope(std::span<const double> grid, std::span<const double> raw) {
  const std::size_t G = grid.size();
  Envelope env;
  env.values.resize(G);
  env.source.resize(G);
  double best = raw[0];
  std::size_t src = 0;
  for (std::size_t j = 0; j < G; ++j) {
    if (raw[j] > best) {
      best = raw[j];
      src = j;
    }
    env.values[j] = best;
    env.source[j] = src;
  }
  // Snap solver noise at the top onto an exact plateau.
  const double top = env.values.back();
  for (std::size_t j = 0; j < G; ++j) {
    if (env.values[j] >= top - 1e-9 * std::abs(top)) env.values[j] = top;
  }
  if (G < 2) return env;
  std::vector<double> d(G - 1), w(G - 1);
  for (std::size_t j = 0; j + 1 < G; ++j) {
    w[j] = grid[j + 1] - grid[j];
    d[j] = (env.values[j + 1] - env.values[j]) / w[j];
  }
  env.slopes = isotonic_nonincreasing(d, w);
  std::vector<double> fitted(G);
  fitted[0] = env.values[0];
  for (std::size_t j = 0; j + 1 < G; ++j) fitted[j + 1] = fitted[j] + env.slopes[j] * w[j];
  // Pooled blocks end on points of the majorant; pin those exactly.
  for (std::size_t j = 1; j < G; ++j) {
    const bool boundary = j + 1 == G || env.slopes[j] != env.slopes[j - 1];
    if (boundary) fitted[j] = env.values[j];
  }
  env.values = std::move(fitted);
  return env;
}

}  // namespace

std::vector<double> concave_envelope(std::span<const double> grid,
                                     std::span<const double> values) {
  if (grid.size() != values.size() || grid.empty()) {
    throw InvalidInput("envelope needs matching, non-empty grid and values");
  }
  return make_envelope(grid, values).values;
}

RevenueCurve::RevenueCurve(std::vector<double> grid, std::vector<double> raw_values,
                           std::vector<Menu> menus, std::size_t solver_warnings)
    : grid_(std::move(grid)),
      raw_(std::move(raw_values)),
      menus_(std::move(menus)),
      warnings_(solver_warnings) {
  const std::size_t G = grid_.size();
  if (G < 2) throw InvalidInput("revenue curve needs at least 2 grid points");
  if (raw_.size() != G || menus_.size() != G) {
    throw InvalidInput("revenue curve grid, values and menus differ in length");
  }
  for (std::size_t j = 1; j < G; ++j) {
    if (!(grid_[j] > grid_[j - 1])) throw InvalidInput("curve grid must increase");
  }
  if (grid_.front() != 0.0 || std::abs(grid_.back() - 1.0) > 1e-12) {
    throw InvalidInput("curve grid must span [0,1]");
  }
  Envelope env = make_envelope(grid_, raw_);
  envelope_ = env.values;
  const double scale = std::max(1.0, std::abs(envelope_.back()));
  // Merge runs of equal slope into segments; their ends are the vertices.
  vertices_.push_back({grid_[0], envelope_[0], env.source[0]});
  std::size_t start = 0;
  for (std::size_t j = 1; j < G; ++j) {
    const bool last = j + 1 == G;
    if (!last && std::abs(env.slopes[j] - env.slopes[start]) <= 1e-12 * scale) continue;
    vertices_.push_back({grid_[j], envelope_[j], env.source[j]});
    segments_.push_back({grid_[start], grid_[j], env.slopes[start],
                         vertices_.size() - 2, vertices_.size() - 1});
    start = j;
  }
  saturation_ = 1.0;
  if (segments_.back().slope <= 0.0) saturation_ = segments_.back().q_lo;
}

std::size_t RevenueCurve::segment_at(double q) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), q,
                             [](double x, const CurveSegment& s) { return x < s.q_hi; });
  if (it == segments_.end()) return segments_.size() - 1;
  return static_cast<std::size_t>(it - segments_.begin());
}

double RevenueCurve::value(double q) const {
  const auto& s = segments_[segment_at(q)];
  const double v0 = vertices_[s.vertex_lo].value;
  return v0 + s.slope * (std::clamp(q, s.q_lo, s.q_hi) - s.q_lo);
}

double RevenueCurve::marginal(double q) const { return segments_[segment_at(q)].slope; }

MenuBracket RevenueCurve::bracket(double q) const {
  const auto& s = segments_[segment_at(q)];
  if (q <= s.q_lo) return {s.vertex_lo, s.vertex_lo, 1.0};
  if (q >= s.q_hi) return {s.vertex_hi, s.vertex_hi, 1.0};
  return {s.vertex_lo, s.vertex_hi, (s.q_hi - q) / (s.q_hi - s.q_lo)};
}

RevenueCurve build_curve(const ValuationPrior& prior, const InventoryDistribution& p,
                         std::span<const double> beta, const CurveConfig& cfg) {
  const std::size_t G = cfg.grid_size;
  if (G < 2) throw InvalidInput("grid size must be at least 2");
  const std::size_t T = p.size();
  const bool exact = T == 1 && cfg.solver.exact_single_type;
  const bool stage_add = cfg.hierarchical && !exact && cfg.menu_class != MenuClass::kAdditive;
  const bool stage_bin = cfg.hierarchical && !exact && cfg.menu_class == MenuClass::kFull && T <= 12;
  std::vector<double> grid(G), raw(G), cover(G);
  std::vector<Menu> menus;
  menus.reserve(G);
  std::vector<Menu> prev_add, prev_bin;
  std::size_t warnings = 0;
  for (std::size_t j = 0; j < G; ++j) {
    grid[j] = j + 1 == G ? 1.0 : static_cast<double>(j) / static_cast<double>(G - 1);
    SolverConfig sc = cfg.solver;
    sc.seed = derive_seed(cfg.solver.seed, streams::kSolver, j);
    std::vector<Menu> seeds;
    if (!menus.empty()) seeds.push_back(menus.back());
    if (stage_add) {
      auto r = solve_constrained(prior, p, beta, grid[j], MenuClass::kAdditive, sc, prev_add);
      prev_add = {r.menu};
      seeds.push_back(r.menu);
    }
    if (stage_bin) {
      std::vector<Menu> s = prev_bin;
      s.insert(s.end(), prev_add.begin(), prev_add.end());
      auto r = solve_constrained(prior, p, beta, grid[j], MenuClass::kBinary, sc, s);
      prev_bin = {r.menu};
      seeds.push_back(r.menu);
    }
    auto r = solve_constrained(prior, p, beta, grid[j], cfg.menu_class, sc, seeds);
    if (!r.converged) ++warnings;
    raw[j] = r.stats.revenue;
    cover[j] = r.stats.alloc_prob;
    menus.push_back(std::move(r.menu));
  }
  // A slack menu is feasible at its own coverage too; adding that knot puts
  // the saturation point where the menu stops serving instead of a grid step.
  struct Knot {
    double q, r;
    std::size_t menu;
  };
  std::vector<Knot> knots;
  for (std::size_t j = 0; j < G; ++j) {
    knots.push_back({grid[j], raw[j], j});
    if (cover[j] > 0.0 && cover[j] < grid[j] - 1e-9) knots.push_back({cover[j], raw[j], j});
  }
  std::ranges::stable_sort(knots, {}, &Knot::q);
  std::vector<double> kq, kr;
  std::vector<Menu> km;
  for (const auto& k : knots) {
    if (!kq.empty() && k.q - kq.back() <= 1e-12) {
      if (k.r > kr.back()) {
        kr.back() = k.r;
        km.back() = menus[k.menu];
      }
      continue;
    }
    kq.push_back(k.q);
    kr.push_back(k.r);
    km.push_back(menus[k.menu]);
  }
  return RevenueCurve(std::move(kq), std::move(kr), std::move(km), warnings);
}

std::vector<double> scale_to_slot(const RevenueCurve& curve, double alpha_s,
                                  double gamma_a) {
  if (!(alpha_s > 0.0) || !(gamma_a > 0.0)) {
    throw InvalidInput("slot and quality effects must be positive");
  }
  std::vector<double> out(curve.values().begin(), curve.values().end());
  for (auto& v : out) v *= alpha_s * gamma_a;
  return out;
}

nlohmann::json curve_to_json(const RevenueCurve& curve, std::size_t advertiser) {
  nlohmann::json menus = nlohmann::json::array();
  for (const auto& m : curve.menus()) menus.push_back(menu_to_json(m));
  return {{"advertiser", advertiser},
          {"grid", std::vector<double>(curve.grid().begin(), curve.grid().end())},
          {"values", std::vector<double>(curve.raw_values().begin(), curve.raw_values().end())},
          {"menus", std::move(menus)}};
}

RevenueCurve curve_from_json(const nlohmann::json& doc,
                             std::span<const double> inventory) {
  std::vector<Menu> menus;
  for (const auto& m : doc.at("menus")) menus.push_back(menu_from_json(m, inventory));
  return RevenueCurve(doc.at("grid").get<std::vector<double>>(),
                      doc.at("values").get<std::vector<double>>(), std::move(menus));
}

}  // namespace ibpa
