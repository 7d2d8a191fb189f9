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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ibpa/core_model.hpp"

namespace ibpa {

enum class MenuClass { kFull, kBinary, kAdditive };

std::string to_string(MenuClass cls);
MenuClass parse_menu_class(std::string_view name);

// Allocation probabilities over types plus a slot-normalized payment.
struct LotteryPricing {
  std::vector<double> alloc;
  double payment = 0.0;
};

struct AdditivePrices {
  double rho0 = 0.0;
  std::vector<double> rho;
};

// A menu of lottery pricings. The null lottery is always available and is
// choice index 0; explicit items are indices 1..K. Additive menus price any
// bundle as rho0 + sum_t p_t chi_t rho_t.
class Menu {
 public:
  static Menu null(std::size_t types, MenuClass cls = MenuClass::kFull);
  static Menu explicit_items(MenuClass cls, std::size_t types,
                             std::vector<LotteryPricing> items);
  static Menu additive(std::span<const double> inventory, double rho0,
                       std::vector<double> rho);

  MenuClass menu_class() const { return class_; }
  std::size_t type_count() const { return types_; }
  bool is_additive() const { return class_ == MenuClass::kAdditive; }
  const std::vector<LotteryPricing>& items() const { return items_; }
  const AdditivePrices& additive_prices() const { return prices_; }
  std::span<const double> inventory() const { return inventory_; }

 private:
  Menu() = default;

  MenuClass class_ = MenuClass::kFull;
  std::size_t types_ = 0;
  std::vector<LotteryPricing> items_;
  AdditivePrices prices_;
  std::vector<double> inventory_;  // p_t, needed to price additive bundles
};

namespace detail {
// Choice rule shared by menu evaluation and the solvers: higher utility wins,
// near-ties (relative 1e-12) go to the higher payment.
inline bool prefer(double value, double pay, double best_u, double best_pay) {
  const double u = value - pay;
  const double tol = 1e-12 * (value + pay + std::abs(best_u) + best_pay);
  if (u > best_u + tol) return true;
  return u >= best_u - tol && pay > best_pay;
}
}  // namespace detail

struct MenuChoice {
  std::size_t index = 0;  // 0 = null; additive menus use 1 for any bundle
  std::vector<double> alloc;
  double payment = 0.0;
  double utility = 0.0;
};

// Utility of item (alloc, payment) is sum_t w_t v_t alloc_t - payment with
// w_t = p_t beta_t. Ties go to the higher payment, then the lower index.
MenuChoice advertiser_choice(const Menu& menu, std::span<const double> v,
                             std::span<const double> weights);
MenuChoice advertiser_choice(const Menu& menu, std::span<const double> v,
                             const InventoryDistribution& p,
                             std::span<const double> beta);

struct MenuStats {
  std::vector<double> choice_probs;  // per choice index
  std::vector<double> type_alloc;    // sum_i w_i chi_t(i)
  double alloc_prob = 0.0;           // sum_t p_t type_alloc_t
  double revenue = 0.0;
};

MenuStats menu_stats(const Menu& menu, const ValuationPrior& prior,
                     const InventoryDistribution& p, std::span<const double> beta);

struct BundleChoice {
  std::vector<bool> bundle;
  double utility = 0.0;
};

// Utility-maximizing bundle under entry fee rho0 and per-type prices rho:
// u(sigma) = -rho0 + sum_{t in sigma} p_t (v_t - rho_t) for nonempty sigma.
// Runs in O(T).
BundleChoice best_bundle(double rho0, std::span<const double> rho,
                         std::span<const double> v, std::span<const double> p);

// Lottery over (slot, type) pairs; alloc[s][t].
struct SlotLottery {
  std::vector<std::vector<double>> alloc;
  double payment = 0.0;
};

// Moves every allocation onto slot s0 with chi_t = sum_s (alpha_s/alpha_s0) chi_st.
Menu collapse_to_top_slot(std::span<const SlotLottery> items,
                          std::span<const double> slot_effects, std::size_t s0);

nlohmann::json menu_to_json(const Menu& menu);
Menu menu_from_json(const nlohmann::json& doc, std::span<const double> inventory);

}  // namespace ibpa
