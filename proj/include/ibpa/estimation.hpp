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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ibpa/core_model.hpp"

namespace ibpa {

// One (advertiser, slot, day) cell of the click log; indices are 0-based.
struct CtrPanelRow {
  std::size_t advertiser = 0;
  std::size_t slot = 0;
  std::size_t day = 0;
  double impressions = 0.0;
  double clicks = 0.0;
};

struct SlotEffectOptions {
  double zero_click_correction = 0.5;  // added to clicks of zero-click rows
  bool weight_by_impressions = true;
};

struct SlotEffectEstimate {
  std::vector<double> alpha;  // alpha_1 = 1, non-increasing
  std::vector<double> gamma;
  double r2 = 0.0;
  std::size_t rows_used = 0;
};

// Log-linear two-way fixed effects, then a monotone projection of log alpha
// and a refit of the advertiser effects.
SlotEffectEstimate estimate_slot_effects(std::span<const CtrPanelRow> panel,
                                         const SlotEffectOptions& opts = {});

struct IccSequence {
  std::vector<double> icc;      // boundary (s, s+1) for s = 0..S-1
  std::vector<double> weights;  // d_s
  bool fallback = false;        // isotonic regression replaced the optimizer
};

// scores[k] = gamma * bid of the advertiser ranked k (losers may follow the
// winners). Slots past alpha have alpha = 0.
IccSequence compute_icc(std::span<const double> scores, std::span<const double> alpha);

// Weighted ICCs with alpha_s replaced by alpha_s d_s; d in [0,1]^S minimizes
// sum (1 - d_s^2) subject to a non-increasing sequence.
IccSequence monotonize_icc(std::span<const double> scores, std::span<const double> alpha);

// ICCs of d-weighted slot effects.
std::vector<double> weighted_icc(std::span<const double> scores,
                                 std::span<const double> alpha,
                                 std::span<const double> d);

struct IntervalObservation {
  double lower = 0.0;  // (lower, upper]
  double upper = 0.0;
  double weight = 1.0;
};

// Valuation interval of the advertiser in slot `slot` out of `slots` filled
// slots. The top slot is capped at 2 b_max, the bottom one starts at 0.
IntervalObservation valuation_bounds(std::span<const double> monotone_icc,
                                     std::size_t slot, std::size_t slots,
                                     double gamma, double b_max);

struct TurnbullResult {
  std::vector<double> lo, hi;  // innermost intervals (lo, hi]
  std::vector<double> mass;
  std::vector<double> loglik;  // initial value, then one per iteration
  std::size_t iterations = 0;
  bool converged = false;

  double cdf(double x) const;
  // Inverse of the piecewise-uniform CDF.
  double quantile(double u) const;
};

TurnbullResult turnbull_em(std::span<const IntervalObservation> obs, double tol = 1e-8,
                           std::size_t max_iter = 100000);

// Rows of an auction log: auction_id,type,slot_count,advertiser,gamma,bid.
struct AuctionLogRow {
  std::string auction;
  std::size_t type = 0;  // 0-based
  std::size_t slot_count = 0;
  std::string advertiser;
  double gamma = 1.0;
  double bid = 0.0;
};

struct ValuationEstimate {
  std::vector<TurnbullResult> per_type;
  std::vector<std::vector<IntervalObservation>> intervals;  // per type
  std::size_t fallbacks = 0;  // auctions whose ICCs needed isotonic fallback
};

// Interval bounds for every winner, pooled per type, one Turnbull fit each.
ValuationEstimate estimate_valuations(std::span<const AuctionLogRow> log,
                                      std::span<const double> alpha,
                                      std::size_t types = 0);

// Equal-weight prior of n draws from the independent per-type marginals.
ValuationPrior prior_from_marginals(std::span<const TurnbullResult> marginals,
                                    std::size_t n, std::uint64_t seed);

// Readers for the CSV formats above (header row required). Panel slots and
// log types are 1-based in the files.
std::vector<CtrPanelRow> read_panel_csv(std::istream& in);
std::vector<CtrPanelRow> read_panel_csv(const std::filesystem::path& path);
std::vector<AuctionLogRow> read_auction_log_csv(std::istream& in);
std::vector<AuctionLogRow> read_auction_log_csv(const std::filesystem::path& path);

nlohmann::json slot_effects_to_json(const SlotEffectEstimate& est);
nlohmann::json valuations_to_json(const ValuationEstimate& est);

}  // namespace ibpa
