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

#include "ibpa/ibpa_mechanism.hpp"
#include "test_support.hpp"

namespace ibpa {
namespace {

using testing::make_env;
using testing::make_instance;
using testing::uniform_grid_prior;

IbpaConfig small_config(std::size_t grid = 51) {
  IbpaConfig cfg;
  cfg.curve.grid_size = grid;
  cfg.mc_samples = 2000;
  return cfg;
}

std::size_t atom_near(const ValuationPrior& prior, double v) {
  const double w[] = {1.0};
  const double x[] = {v};
  return nearest_atom(prior, x, w);
}

class UniformPair : public ::testing::Test {
 protected:
  PriorPtr prior = uniform_grid_prior(1000);
  AuctionEnvironment env = make_env({1.0}, {1.0}, {1.0, 1.0}, {prior, prior});
  IbpaArtifacts art =
      IbpaArtifacts::build(env, Regime::full_info_null_disclosure(1), small_config());
  const RevenueCurve& curve = art.sub_auction(0).curve(0);
};

TEST_F(UniformPair, CriticalQuantileAloneIsZeroOfSlope) {
  EXPECT_NEAR(critical_quantile(curve, 1.0, std::nullopt), 0.5, 0.021);
}

TEST_F(UniformPair, CriticalQuantileMatchesEqualCurveRival) {
  const RankKey rival{curve.marginal(0.4), 0.4, 1};
  EXPECT_DOUBLE_EQ(critical_quantile(curve, 1.0, rival), 0.4);
}

TEST_F(UniformPair, CriticalQuantileAgainstZeroRivalIsSaturation) {
  const RankKey rival{0.0, 0.9, 1};
  EXPECT_DOUBLE_EQ(critical_quantile(curve, 1.0, rival), curve.saturation());
}

TEST_F(UniformPair, HigherValueWins) {
  const auto out = run_ibpa(art, make_instance(0, {atom_near(*prior, 0.9), atom_near(*prior, 0.6)}));
  ASSERT_TRUE(out.assignment[0].has_value());
  EXPECT_EQ(*out.assignment[0], 0u);
  EXPECT_NEAR(out.quantiles[0], 0.1, 0.021);
  EXPECT_NEAR(out.quantiles[1], 0.4, 0.021);
}

TEST_F(UniformPair, WinnerPaysSecondPriceAboveReserve) {
  const auto out = run_ibpa(art, make_instance(0, {atom_near(*prior, 0.9), atom_near(*prior, 0.6)}));
  EXPECT_NEAR(out.expected_payments[0], 0.6, 0.01);
  EXPECT_EQ(out.expected_payments[1], 0.0);
  EXPECT_DOUBLE_EQ(out.revenue, out.expected_payments[0]);
}

TEST_F(UniformPair, WinnerPaysReserveAgainstWeakRival) {
  const auto out = run_ibpa(art, make_instance(0, {atom_near(*prior, 0.8), atom_near(*prior, 0.3)}));
  ASSERT_TRUE(out.assignment[0].has_value());
  EXPECT_NEAR(out.expected_payments[0], 0.5, 0.021);
  EXPECT_NEAR(out.per_click_payments[0], out.expected_payments[0], 1e-12);
}

TEST_F(UniformPair, NobodyAboveReserveSellsNothing) {
  const auto out = run_ibpa(art, make_instance(0, {atom_near(*prior, 0.3), atom_near(*prior, 0.2)}));
  EXPECT_FALSE(out.any_assigned());
  EXPECT_EQ(out.revenue, 0.0);
}

TEST(IbpaMechanism, MonopolyPriceAtSaturation) {
  auto prior = uniform_grid_prior(1000);
  auto env = make_env({1.0}, {1.0}, {1.0}, {prior});
  auto art = IbpaArtifacts::build(env, Regime::full_info_null_disclosure(1), small_config());
  const auto out = run_ibpa(art, make_instance(0, {atom_near(*prior, 0.8)}));
  EXPECT_NEAR(out.expected_payments[0], 0.5, 0.021);
  EXPECT_NEAR(out.utilities[0], 0.8 - out.expected_payments[0], 1e-3);
}

TEST(IbpaMechanism, TwoSlotsSplitPaymentByPosition) {
  auto prior = uniform_grid_prior(1000);
  auto env = make_env({1.0}, {1.0, 0.5}, {1.0, 1.0}, {prior, prior});
  auto art = IbpaArtifacts::build(env, Regime::full_info_null_disclosure(1), small_config());
  const auto out = run_ibpa(art, make_instance(0, {atom_near(*prior, 0.9), atom_near(*prior, 0.6)}));
  ASSERT_TRUE(out.assignment[0] && out.assignment[1]);
  EXPECT_EQ(*out.assignment[0], 0u);
  EXPECT_EQ(*out.assignment[1], 1u);
  // Myerson position auction: top pays (a1 - a2) max(v2, r) + a2 r, second pays a2 r.
  EXPECT_NEAR(out.expected_payments[0], 0.5 * 0.6 + 0.5 * 0.5, 0.015);
  EXPECT_NEAR(out.expected_payments[1], 0.5 * 0.5, 0.015);
  EXPECT_NEAR(out.per_click_payments[1], 0.5, 0.03);
}

TEST(IbpaMechanism, ZeroValuesSellNothing) {
  auto prior = testing::discrete_prior({{0.0, 0.0}}, {1.0});
  auto env = make_env({0.5, 0.5}, {1.0}, {1.0, 1.0}, {prior, prior});
  auto art = IbpaArtifacts::build(env, Regime::full_info_null_disclosure(2), small_config(11));
  for (std::size_t t = 0; t < 2; ++t) {
    const auto out = run_ibpa(art, make_instance(t, {0, 0}));
    EXPECT_FALSE(out.any_assigned());
    EXPECT_EQ(out.revenue, 0.0);
  }
}

TEST(IbpaMechanism, SingleAdvertiserMatchesMenuAtSaturation) {
  // Two types, null disclosure, additive menus: the lone advertiser faces the
  // menu at the curve's saturation point.
  auto prior = testing::uniform_sampled_prior(300, 2, 11);
  auto env = make_env({0.6, 0.4}, {1.0}, {0.8}, {prior});
  IbpaConfig cfg = small_config(21);
  cfg.curve.menu_class = MenuClass::kAdditive;
  auto art = IbpaArtifacts::build(env, Regime::full_info_null_disclosure(2), cfg);
  const SubAuction& sub = art.sub_auction(0);
  const RevenueCurve& curve = sub.curve(0);
  for (std::size_t atom : {0u, 17u, 123u, 299u}) {
    for (std::size_t t = 0; t < 2; ++t) {
      const auto out = run_ibpa(art, make_instance(t, {atom}));
      const MixedChoice c = mixed_choice(curve, sub.table(0), curve.saturation(), atom, t);
      if (c.alloc_t <= 0.0) {
        EXPECT_FALSE(out.any_assigned());
        continue;
      }
      ASSERT_TRUE(out.any_assigned());
      EXPECT_DOUBLE_EQ(out.critical_quantiles[0], curve.saturation());
      EXPECT_NEAR(out.expected_payments[0], 0.8 * c.payment / c.mass, 1e-12);
    }
  }
}

TEST(IbpaMechanism, OutcomesAreFeasible) {
  auto p1 = testing::uniform_sampled_prior(200, 2, 3);
  auto p2 = testing::uniform_sampled_prior(200, 2, 4, 2.0);
  auto env = make_env({0.3, 0.7}, {1.0, 0.6}, {1.0, 0.7, 0.9}, {p1, p2, p1}, {1.0, 0.8});
  IbpaConfig cfg = small_config(21);
  cfg.curve.menu_class = MenuClass::kAdditive;
  auto art = IbpaArtifacts::build(env, Regime::full_info_null_disclosure(2), cfg);
  for (std::uint64_t k = 0; k < 300; ++k) {
    const auto inst = sample_auction(env, derive_seed(5, streams::kInstance, k));
    const auto out = run_ibpa(art, inst);
    std::vector<int> held(3, 0);
    double total = 0.0;
    for (std::size_t s = 0; s < out.assignment.size(); ++s) {
      if (out.assignment[s]) ++held[*out.assignment[s]];
    }
    for (std::size_t a = 0; a < 3; ++a) {
      EXPECT_LE(held[a], 1);
      const auto slot = out.slot_of(a);
      if (!slot) {
        EXPECT_EQ(out.expected_payments[a], 0.0);
        EXPECT_EQ(out.utilities[a], 0.0);
        continue;
      }
      EXPECT_GE(out.critical_quantiles[a], out.quantiles[a]);
      EXPECT_GE(out.expected_payments[a], 0.0);
      const double v = env.prior(a).value(inst.atom[a], inst.type);
      EXPECT_NEAR(out.utilities[a], env.ctr().ctr(a, *slot, inst.type) * v - out.expected_payments[a],
                  1e-12);
      total += out.expected_payments[a];
    }
    EXPECT_EQ(out.revenue, total);
  }
}

TEST(IbpaMechanism, LoweringWinnerQuantileKeepsSlotAndPrice) {
  auto prior = uniform_grid_prior(1000);
  auto env = make_env({1.0}, {1.0}, {1.0, 1.0}, {prior, prior});
  auto art = IbpaArtifacts::build(env, Regime::full_info_null_disclosure(1), small_config());
  const std::size_t rival = atom_near(*prior, 0.55);
  const auto base = run_ibpa(art, make_instance(0, {atom_near(*prior, 0.7), rival}));
  ASSERT_EQ(base.assignment[0], std::optional<std::size_t>(0));
  for (double v : {0.75, 0.85, 0.95, 0.999}) {
    const auto out = run_ibpa(art, make_instance(0, {atom_near(*prior, v), rival}));
    ASSERT_EQ(out.assignment[0], std::optional<std::size_t>(0));
    EXPECT_DOUBLE_EQ(out.critical_quantiles[0], base.critical_quantiles[0]);
    EXPECT_DOUBLE_EQ(out.expected_payments[0], base.expected_payments[0]);
  }
}

TEST(IbpaMechanism, FullDisclosureMatchesMyersonPerAuction) {
  // Two independent uniform types, fully disclosed: each auction is a single
  // item auction with reserve 1/2.
  // First coordinate: 400 levels, three atoms each. Second: a permuted 1200-level grid.
  const std::size_t N = 400, M = 3 * N;
  std::vector<std::vector<double>> atoms;
  for (std::size_t k = 0; k < M; ++k) {
    atoms.push_back({(k / 3 + 0.5) / N, ((k * 7 + 3) % M + 0.5) / M});
  }
  auto prior = testing::discrete_prior(atoms, std::vector<double>(atoms.size(), 1.0 / atoms.size()));
  auto env = make_env({0.5, 0.5}, {1.0}, {1.0, 1.0}, {prior, prior});
  const Regime regime(Partition::full(2), Partition::full(2));
  auto art = IbpaArtifacts::build(env, regime, small_config());
  double gap = 0.0, worst = 0.0;
  const std::size_t n = 10000;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto inst = sample_auction(env, derive_seed(9, streams::kInstance, k));
    const double v0 = prior->value(inst.atom[0], inst.type);
    const double v1 = prior->value(inst.atom[1], inst.type);
    const double hi = std::max(v0, v1), lo = std::min(v0, v1);
    const double myerson = hi >= 0.5 ? std::max(lo, 0.5) : 0.0;
    const double d = run_ibpa(art, inst).revenue - myerson;
    gap += d;
    // Reserve ties near 1/2 can flip; elsewhere the prices agree to grid accuracy.
    if (std::abs(hi - 0.5) > 0.03) worst = std::max(worst, std::abs(d));
  }
  EXPECT_LT(std::abs(gap / n), 0.005);
  EXPECT_LT(worst, 0.03);
}

TEST(IbpaMechanism, ZeroProbabilityTypeIsRejected) {
  auto prior = testing::uniform_sampled_prior(50, 2, 1);
  auto env = make_env({1.0, 0.0}, {1.0}, {1.0}, {prior});
  auto art = IbpaArtifacts::build(env, Regime(Partition::full(2), Partition::full(2)),
                                  small_config(11));
  EXPECT_THROW(art.locate(1), InvalidInput);
  EXPECT_NO_THROW(art.locate(0));
}

TEST(IbpaMechanism, InfeasibleRegimeThrows) {
  EXPECT_THROW(Regime(Partition::null(3), Partition::full(3)), RegimeError);
}

TEST(IbpaMechanism, OutcomeJsonUsesOneBasedIds) {
  MechanismOutcome out(2, 3);
  out.seed = 42;
  out.type = 1;
  out.assignment[0] = 2;
  out.expected_payments[2] = 0.25;
  out.revenue = 0.25;
  const auto j = outcome_to_json(out);
  EXPECT_EQ(j.at("seed"), 42);
  EXPECT_EQ(j.at("type"), 2);
  EXPECT_EQ(j.at("assignment")[0], 3);
  EXPECT_TRUE(j.at("assignment")[1].is_null());
  EXPECT_DOUBLE_EQ(j.at("payments")[2].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(j.at("revenue").get<double>(), 0.25);
}

}  // namespace
}  // namespace ibpa
