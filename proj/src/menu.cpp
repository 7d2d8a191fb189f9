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

#include "ibpa/menu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ibpa {


std::string to_string(MenuClass cls) {
  switch (cls) {
    case MenuClass::kFull: return "full";
    case MenuClass::kBinary: return "binary";
    case MenuClass::kAdditive: return "additive";
  }
  return "full";
}

MenuClass parse_menu_class(std::string_view name) {
  if (name == "full") return MenuClass::kFull;
  if (name == "binary" || name == "bin") return MenuClass::kBinary;
  if (name == "additive" || name == "add") return MenuClass::kAdditive;
  throw InvalidInput("unknown menu class '" + std::string(name) + "'");
}

Menu Menu::null(std::size_t types, MenuClass cls) {
  Menu m;
  m.class_ = cls;
  m.types_ = types;
  if (cls == MenuClass::kAdditive) {
    // An unaffordable entry fee leaves only the null lottery.
    m.prices_.rho0 = std::numeric_limits<double>::infinity();
    m.prices_.rho.assign(types, 0.0);
    m.inventory_.assign(types, 1.0 / static_cast<double>(types));
  }
  return m;
}

Menu Menu::explicit_items(MenuClass cls, std::size_t types,
                          std::vector<LotteryPricing> items) {
  if (cls == MenuClass::kAdditive) {
    throw InvalidInput("additive menus are defined by prices, not items");
  }
  for (const auto& it : items) {
    if (it.alloc.size() != types) throw InvalidInput("menu item has wrong dimension");
    for (double x : it.alloc) {
      if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("allocation outside [0,1]");
      if (cls == MenuClass::kBinary && x != 0.0 && x != 1.0) {
        throw InvalidInput("binary menu item with fractional allocation");
      }
    }
  }
  Menu m;
  m.class_ = cls;
  m.types_ = types;
  m.items_ = std::move(items);
  return m;
}

Menu Menu::additive(std::span<const double> inventory, double rho0,
                    std::vector<double> rho) {
  if (rho.size() != inventory.size()) {
    throw InvalidInput("additive prices do not match the number of types");
  }
  if (!(rho0 >= 0.0)) throw InvalidInput("entry fee must be >= 0");
  Menu m;
  m.class_ = MenuClass::kAdditive;
  m.types_ = rho.size();
  m.prices_ = AdditivePrices{rho0, std::move(rho)};
  m.inventory_.assign(inventory.begin(), inventory.end());
  return m;
}

BundleChoice best_bundle(double rho0, std::span<const double> rho,
                         std::span<const double> v, std::span<const double> p) {
  const std::size_t T = v.size();
  BundleChoice out{std::vector<bool>(T, false), 0.0};
  // Types whose surplus alone covers the entry fee.
  bool large = false;
  for (std::size_t t = 0; t < T; ++t) {
    if (p[t] > 0.0 && p[t] * (v[t] - rho[t]) > rho0) large = true;
  }
  double surplus = 0.0;
  bool any = false;
  for (std::size_t t = 0; t < T; ++t) {
    if (p[t] > 0.0 && v[t] >= rho[t]) {
      out.bundle[t] = true;
      surplus += p[t] * (v[t] - rho[t]);
      any = true;
    }
  }
  if (large || (any && surplus - rho0 >= 0.0)) {
    out.utility = surplus - rho0;
    return out;
  }
  std::fill(out.bundle.begin(), out.bundle.end(), false);
  return out;
}

MenuChoice advertiser_choice(const Menu& menu, std::span<const double> v,
                             std::span<const double> weights) {
  const std::size_t T = menu.type_count();
  MenuChoice best;
  if (menu.is_additive()) {
    const auto& pr = menu.additive_prices();
    const auto p = menu.inventory();
    std::vector<double> eff(T);
    for (std::size_t t = 0; t < T; ++t) eff[t] = p[t] > 0.0 ? weights[t] * v[t] / p[t] : 0.0;
    auto bundle = best_bundle(pr.rho0, pr.rho, eff, p);
    best.alloc.assign(T, 0.0);
    bool any = false;
    double pay = pr.rho0;
    for (std::size_t t = 0; t < T; ++t) {
      if (bundle.bundle[t]) {
        best.alloc[t] = 1.0;
        pay += p[t] * pr.rho[t];
        any = true;
      }
    }
    if (any) {
      best.index = 1;
      best.payment = pay;
      best.utility = bundle.utility;
    } else {
      best.alloc.assign(T, 0.0);
    }
    return best;
  }
  std::size_t best_k = 0;
  double best_u = 0.0;
  double best_pay = 0.0;
  const auto& items = menu.items();
  for (std::size_t k = 0; k < items.size(); ++k) {
    double value = 0.0;
    for (std::size_t t = 0; t < T; ++t) value += weights[t] * v[t] * items[k].alloc[t];
    if (detail::prefer(value, items[k].payment, best_u, best_pay)) {
      best_k = k + 1;
      best_u = value - items[k].payment;
      best_pay = items[k].payment;
    }
  }
  best.index = best_k;
  best.utility = best_u;
  best.payment = best_pay;
  if (best_k == 0) {
    best.alloc.assign(T, 0.0);
  } else {
    best.alloc = items[best_k - 1].alloc;
  }
  return best;
}

MenuChoice advertiser_choice(const Menu& menu, std::span<const double> v,
                             const InventoryDistribution& p,
                             std::span<const double> beta) {
  std::vector<double> w(p.size());
  for (std::size_t t = 0; t < w.size(); ++t) w[t] = p[t] * beta[t];
  return advertiser_choice(menu, v, w);
}

MenuStats menu_stats(const Menu& menu, const ValuationPrior& prior,
                     const InventoryDistribution& p, std::span<const double> beta) {
  const std::size_t T = menu.type_count();
  std::vector<double> w(T);
  for (std::size_t t = 0; t < T; ++t) w[t] = p[t] * beta[t];
  MenuStats st;
  st.choice_probs.assign(menu.is_additive() ? 2 : menu.items().size() + 1, 0.0);
  st.type_alloc.assign(T, 0.0);
  for (std::size_t i = 0; i < prior.atom_count(); ++i) {
    const double wi = prior.weight(i);
    auto c = advertiser_choice(menu, prior.atom(i), w);
    st.choice_probs[c.index] += wi;
    st.revenue += wi * c.payment;
    for (std::size_t t = 0; t < T; ++t) st.type_alloc[t] += wi * c.alloc[t];
  }
  for (std::size_t t = 0; t < T; ++t) st.alloc_prob += p[t] * st.type_alloc[t];
  return st;
}

Menu collapse_to_top_slot(std::span<const SlotLottery> items,
                          std::span<const double> slot_effects, std::size_t s0) {
  if (s0 >= slot_effects.size()) throw InvalidInput("top slot out of range");
  std::vector<LotteryPricing> out;
  std::size_t types = 0;
  for (const auto& it : items) {
    if (it.alloc.size() > slot_effects.size()) {
      throw InvalidInput("lottery allocates more slots than exist");
    }
    types = it.alloc.empty() ? types : it.alloc.front().size();
    LotteryPricing lp{std::vector<double>(types, 0.0), it.payment};
    for (std::size_t t = 0; t < types; ++t) {
      double mass = 0.0;
      for (std::size_t s = 0; s < it.alloc.size(); ++s) {
        const double x = it.alloc[s][t];
        if (x < 0.0) throw InvalidInput("negative allocation probability");
        mass += x;
        lp.alloc[t] += slot_effects[s] / slot_effects[s0] * x;
      }
      if (mass > 1.0 + 1e-12) {
        throw InvalidInput("lottery assigns more than one slot to a type");
      }
      if (lp.alloc[t] > 1.0 + 1e-12) {
        throw InvalidInput("collapsed allocation exceeds 1; choose a higher top slot");
      }
      lp.alloc[t] = std::min(lp.alloc[t], 1.0);
    }
    out.push_back(std::move(lp));
  }
  return Menu::explicit_items(MenuClass::kFull, types, std::move(out));
}

nlohmann::json menu_to_json(const Menu& menu) {
  nlohmann::json doc;
  doc["class"] = to_string(menu.menu_class());
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : menu.items()) {
    items.push_back({{"alloc", it.alloc}, {"payment", it.payment}});
  }
  doc["items"] = std::move(items);
  if (menu.is_additive()) {
    const auto& pr = menu.additive_prices();
    doc["additive"] = {{"rho0", std::isfinite(pr.rho0) ? pr.rho0 : -1.0},
                       {"rho", pr.rho}};
  }
  return doc;
}

Menu menu_from_json(const nlohmann::json& doc, std::span<const double> inventory) {
  const MenuClass cls = parse_menu_class(doc.at("class").get<std::string>());
  if (cls == MenuClass::kAdditive) {
    const auto& add = doc.at("additive");
    const double rho0 = add.at("rho0").get<double>();
    if (rho0 < 0.0) return Menu::null(inventory.size(), MenuClass::kAdditive);
    return Menu::additive(inventory, rho0, add.at("rho").get<std::vector<double>>());
  }
  std::vector<LotteryPricing> items;
  for (const auto& it : doc.at("items")) {
    items.push_back({it.at("alloc").get<std::vector<double>>(),
                     it.at("payment").get<double>()});
  }
  return Menu::explicit_items(cls, inventory.size(), std::move(items));
}

}  // namespace ibpa
