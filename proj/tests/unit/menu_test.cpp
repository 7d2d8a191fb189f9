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


#include <gtest/gtest.h>

#include <cmath>

#include "ibpa/menu.hpp"
#include "test_support.hpp"

namespace ibpa {
namespace {

TEST(MenuClass, Names) {
  for (auto c : {MenuClass::kFull, MenuClass::kBinary, MenuClass::kAdditive}) {
    EXPECT_EQ(parse_menu_class(to_string(c)), c);
  }
  EXPECT_THROW(parse_menu_class("fancy"), InvalidInput);
}

TEST(Menu, ItemValidation) {
  EXPECT_THROW(Menu::explicit_items(MenuClass::kBinary, 2, {{{0.5, 1.0}, 1.0}}), InvalidInput);
  EXPECT_THROW(Menu::explicit_items(MenuClass::kFull, 2, {{{1.0}, 1.0}}), InvalidInput);
  EXPECT_THROW(Menu::explicit_items(MenuClass::kFull, 1, {{{1.5}, 1.0}}), InvalidInput);
  EXPECT_THROW(Menu::explicit_items(MenuClass::kAdditive, 1, {}), InvalidInput);
  const double p[] = {0.5, 0.5};
  EXPECT_THROW(Menu::additive(p, -1.0, {0.0, 0.0}), InvalidInput);
  EXPECT_THROW(Menu::additive(p, 0.0, {0.0}), InvalidInput);
}

TEST(AdvertiserChoice, PicksHighestUtility) {
  const auto m = Menu::explicit_items(MenuClass::kFull, 2,
                                      {{{1.0, 0.0}, 0.3}, {{1.0, 1.0}, 0.5}, {{0.5, 0.5}, 0.1}});
  const double w[] = {0.5, 0.5};
  const double v1[] = {1.0, 0.2};  // utilities 0.2, 0.1, 0.2; tie goes to payment 0.3
  auto c = advertiser_choice(m, v1, w);
  EXPECT_EQ(c.index, 1u);
  EXPECT_NEAR(c.utility, 0.2, 1e-15);
  const double v2[] = {1.0, 1.0};  // 0.2, 0.5, 0.4
  EXPECT_EQ(advertiser_choice(m, v2, w).index, 2u);
  const double v3[] = {0.1, 0.1};  // all negative
  c = advertiser_choice(m, v3, w);
  EXPECT_EQ(c.index, 0u);
  EXPECT_EQ(c.alloc, std::vector<double>(2, 0.0));
  EXPECT_EQ(c.payment, 0.0);
}

TEST(AdvertiserChoice, IndifferentBuyerPays) {
  const auto m = Menu::explicit_items(MenuClass::kFull, 1, {{{1.0}, 0.4}});
  const double w[] = {1.0};
  const double v[] = {0.4};
  EXPECT_EQ(advertiser_choice(m, v, w).index, 1u);
  // Rounding-level differences still count as ties.
  const double v2[] = {0.4 * (1.0 - 1e-14)};
  EXPECT_EQ(advertiser_choice(m, v2, w).index, 1u);
  const double v3[] = {0.399};
  EXPECT_EQ(advertiser_choice(m, v3, w).index, 0u);
}

TEST(AdvertiserChoice, OverloadsAgree) {
  const InventoryDistribution p({0.3, 0.7});
  const double beta[] = {1.0, 0.5};
  const auto m = Menu::explicit_items(MenuClass::kFull, 2, {{{1.0, 0.0}, 0.2}, {{0.0, 1.0}, 0.2}});
  const double v[] = {1.0, 1.0};
  const double w[] = {0.3, 0.35};
  EXPECT_EQ(advertiser_choice(m, v, p, beta).index, advertiser_choice(m, v, w).index);
  EXPECT_EQ(advertiser_choice(m, v, w).index, 2u);
}

double bundle_utility(double rho0, std::span<const double> rho, std::span<const double> v,
                      std::span<const double> p, unsigned mask) {
  if (mask == 0) return 0.0;
  double u = -rho0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (mask >> t & 1u) u += p[t] * (v[t] - rho[t]);
  }
  return u;
}

TEST(BestBundle, MatchesExhaustiveSearch) {
  Rng rng(17);
  for (std::size_t T = 1; T <= 12; ++T) {
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> v(T), rho(T), p(T);
      double tot = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        v[t] = uniform01(rng);
        rho[t] = uniform01(rng);
        p[t] = uniform01(rng);
        tot += p[t];
      }
      for (auto& x : p) x /= tot;
      const double rho0 = 0.3 * uniform01(rng);
      double best = 0.0;
      for (unsigned mask = 1; mask < (1u << T); ++mask) {
        best = std::max(best, bundle_utility(rho0, rho, v, p, mask));
      }
      const auto got = best_bundle(rho0, rho, v, p);
      unsigned mask = 0;
      for (std::size_t t = 0; t < T; ++t) mask |= unsigned(got.bundle[t]) << t;
      EXPECT_NEAR(got.utility, best, 1e-12);
      EXPECT_NEAR(bundle_utility(rho0, rho, v, p, mask), best, 1e-12);
    }
  }
}

TEST(AdditiveMenu, PricesBundleAdditively) {
  const double p[] = {0.25, 0.75};
  const auto m = Menu::additive(p, 0.1, {0.4, 0.8});
  const double w[] = {0.25, 0.75};
  const double v[] = {1.0, 0.5};  // type 1 only: 0.25 * 0.6 - 0.1 = 0.05
  const auto c = advertiser_choice(m, v, w);
  EXPECT_EQ(c.index, 1u);
  EXPECT_EQ(c.alloc, (std::vector<double>{1.0, 0.0}));
  EXPECT_NEAR(c.payment, 0.1 + 0.25 * 0.4, 1e-15);
  EXPECT_NEAR(c.utility, 0.05, 1e-15);
  const double poor[] = {0.45, 0.5};
  EXPECT_EQ(advertiser_choice(m, poor, w).index, 0u);
  const double nothing[] = {5.0, 5.0};
  EXPECT_EQ(advertiser_choice(Menu::null(2, MenuClass::kAdditive), nothing, w).index, 0u);
}

TEST(MenuStats, MatchesHandComputation) {
  const auto prior = ValuationPrior::discrete({{1.0, 0.0}, {0.0, 1.0}, {0.2, 0.2}},
                                              {0.5, 0.25, 0.25});
  const InventoryDistribution p({0.5, 0.5});
  const double beta[] = {1.0, 1.0};
  const auto m = Menu::explicit_items(MenuClass::kFull, 2,
                                      {{{1.0, 0.0}, 0.3}, {{0.0, 0.5}, 0.1}});
  const auto st = menu_stats(m, prior, p, beta);
  // Atom 1 takes item 1, atom 2 item 2 (0.25 - 0.1), atom 3 nothing.
  EXPECT_NEAR(st.revenue, 0.5 * 0.3 + 0.25 * 0.1, 1e-15);
  EXPECT_NEAR(st.choice_probs[0], 0.25, 1e-15);
  EXPECT_NEAR(st.type_alloc[0], 0.5, 1e-15);
  EXPECT_NEAR(st.type_alloc[1], 0.125, 1e-15);
  EXPECT_NEAR(st.alloc_prob, 0.5 * 0.5 + 0.5 * 0.125, 1e-15);
}

TEST(Collapse, ScalesLowerSlotsBySlotEffect) {
  const double alpha[] = {1.0, 0.6, 0.3};
  std::vector<SlotLottery> items{{{{0.5, 0.0}, {0.5, 1.0}, {0.0, 0.0}}, 0.7}};
  const auto m = collapse_to_top_slot(items, alpha, 0);
  ASSERT_EQ(m.items().size(), 1u);
  EXPECT_NEAR(m.items()[0].alloc[0], 0.5 + 0.3, 1e-15);
  EXPECT_NEAR(m.items()[0].alloc[1], 0.6, 1e-15);
  EXPECT_EQ(m.items()[0].payment, 0.7);
  // Relative to slot 2 a full slot-1 allocation exceeds one.
  std::vector<SlotLottery> top{{{{1.0}, {0.0}}, 0.5}};
  EXPECT_THROW(collapse_to_top_slot(top, alpha, 1), InvalidInput);
  std::vector<SlotLottery> twice{{{{0.8}, {0.8}}, 0.5}};
  EXPECT_THROW(collapse_to_top_slot(twice, alpha, 0), InvalidInput);
}

TEST(Collapse, PreservesExpectedClicksValue) {
  // Value of a slot lottery is sum_s alpha_s chi_st; collapsing keeps it per slot-s0 unit.
  Rng rng(3);
  const double alpha[] = {1.0, 0.7, 0.2};
  for (int trial = 0; trial < 50; ++trial) {
    SlotLottery it;
    it.alloc.assign(3, std::vector<double>(2));
    for (std::size_t t = 0; t < 2; ++t) {
      double left = 1.0;
      for (std::size_t s = 0; s < 3; ++s) {
        it.alloc[s][t] = left * uniform01(rng);
        left -= it.alloc[s][t];
      }
    }
    const auto m = collapse_to_top_slot(std::span<const SlotLottery>(&it, 1), alpha, 0);
    for (std::size_t t = 0; t < 2; ++t) {
      double clicks = 0.0;
      for (std::size_t s = 0; s < 3; ++s) clicks += alpha[s] * it.alloc[s][t];
      EXPECT_NEAR(m.items()[0].alloc[t], clicks, 1e-14);
    }
  }
}

TEST(MenuJson, RoundTrip) {
  const double p[] = {0.4, 0.6};
  const auto full = Menu::explicit_items(MenuClass::kFull, 2, {{{0.25, 1.0}, 0.5}});
  const auto back = menu_from_json(nlohmann::json::parse(menu_to_json(full).dump()), p);
  EXPECT_EQ(back.items()[0].alloc, full.items()[0].alloc);
  EXPECT_EQ(back.items()[0].payment, 0.5);
  const auto add = Menu::additive(p, 0.2, {0.1, 0.3});
  const auto add_back = menu_from_json(menu_to_json(add), p);
  EXPECT_TRUE(add_back.is_additive());
  EXPECT_EQ(add_back.additive_prices().rho, add.additive_prices().rho);
  const auto none = menu_from_json(menu_to_json(Menu::null(2, MenuClass::kAdditive)), p);
  const double w[] = {0.4, 0.6};
  const double v[] = {100.0, 100.0};
  EXPECT_EQ(advertiser_choice(none, v, w).index, 0u);
}

}  // namespace
}  // namespace ibpa
