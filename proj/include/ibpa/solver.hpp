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

#include <cstdint>
#include <span>
#include <vector>

#include "ibpa/core_model.hpp"
#include "ibpa/menu.hpp"

namespace ibpa {

struct SolverConfig {
  std::size_t population = 100;
  std::size_t parents = 50;
  std::size_t elites = 5;
  double crossover_rate = 0.8;
  double mutation_rate = 0.2;
  std::size_t max_generations = 300;
  std::size_t stall_generations = 60;  // stop after this many without progress
  std::size_t max_items = 8;           // K_max for the full class
  double penalty_weight = 1e4;         // times the objective scale
  bool polish = true;                  // pattern search on the GA winner
  bool exact_single_type = true;       // closed-form solve when T = 1
  std::uint64_t seed = 1;
};

struct SolveResult {
  Menu menu;
  MenuStats stats;
  bool converged = true;  // false when the GA hit max_generations
};

// Slot-normalized single-advertiser problem: maximize expected payment over
// menus of class cls subject to ex-ante allocation probability <= q.
// seeds are injected into the initial population (converted to cls).
SolveResult solve_constrained(const ValuationPrior& prior,
                              const InventoryDistribution& p,
                              std::span<const double> beta, double q,
                              MenuClass cls, const SolverConfig& cfg,
                              std::span<const Menu> seeds = {});

// Exact solution for a single type: concave hull of posted-price revenues
// (lotteries between two prices) for the full class, best posted price
// otherwise.
SolveResult solve_single_type(const ValuationPrior& prior,
                              const InventoryDistribution& p,
                              std::span<const double> beta, double q,
                              MenuClass cls);

}  // namespace ibpa
