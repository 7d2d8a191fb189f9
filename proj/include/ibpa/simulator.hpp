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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ibpa/core_model.hpp"
#include "ibpa/gsp_mechanism.hpp"
#include "ibpa/ibpa_mechanism.hpp"
#include "ibpa/outcome.hpp"

namespace ibpa {

enum class MechanismKind { kIbpa, kIbpaBinary, kIbpaAdditive, kGsp };

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kIbpa;
  Regime regime = Regime::full_info_null_disclosure(1);
  std::string name;  // empty: derived from kind and regime
};

// FI/NI and FD/ND for full and null partitions, the explicit blocks otherwise.
std::string regime_label(const Regime& regime);
std::string mechanism_name(const MechanismSpec& spec);

// Names like "ibpa-fi-nd", "IBPA_add-FI-ND" or "gsp-ni-nd".
MechanismSpec parse_mechanism(std::string_view name, std::size_t types);

struct SimulationConfig {
  std::size_t n_auctions = 100000;
  std::vector<MechanismSpec> mechanisms;
  std::optional<std::size_t> slot_count;  // keep only the top slots
  std::uint64_t seed = 1;
  IbpaConfig ibpa;  // curve and solver settings; participation is overridden
  Participation participation;
  double gsp_reserve = 0.0;
  GspEquilibrium gsp_equilibrium = GspEquilibrium::kEnvyFreeUpper;
  std::string baseline = "GSP-FI-FD";
  std::size_t threads = 1;  // 0 = hardware concurrency
  bool keep_outcomes = false;
};

SimulationConfig simulation_config_from_json(const nlohmann::json& doc, std::size_t types);

struct MechanismMetrics {
  std::string mechanism;
  std::string regime;
  std::size_t n = 0;
  double revenue = 0.0, revenue_se = 0.0;
  double adv_welfare = 0.0, adv_welfare_se = 0.0;
  double total_welfare = 0.0, total_welfare_se = 0.0;
  double alloc_rate = 0.0, alloc_rate_se = 0.0;
  // Relative to the baseline: percent for money, percentage points for rates.
  std::optional<double> revenue_delta_pct;
  std::optional<double> adv_welfare_delta_pct;
  std::optional<double> total_welfare_delta_pct;
  std::optional<double> alloc_rate_delta_pp;
};

// Means and standard errors over an outcome stream.
MechanismMetrics welfare_metrics(std::span<const MechanismOutcome> outcomes);

struct MetricsReport {
  std::vector<MechanismMetrics> rows;
  std::string baseline;
  std::vector<std::vector<double>> revenues;  // per mechanism, per auction
  std::vector<std::vector<MechanismOutcome>> outcomes;  // when kept
  double build_seconds = 0.0;
  double run_seconds = 0.0;
};

struct PairedDifference {
  double mean = 0.0;
  double se = 0.0;
};

// Revenue of mechanism i minus mechanism j, auction by auction.
PairedDifference paired_revenue_difference(const MetricsReport& report, std::size_t i,
                                           std::size_t j);

// Draws the same instances for every mechanism (instance k uses substream k
// of the master seed) and runs them all.
MetricsReport run_comparison(const AuctionEnvironment& env, const SimulationConfig& cfg);

// Fills the delta columns against the named mechanism; no-op when missing.
void apply_baseline(MetricsReport& report, const std::string& baseline);

// "+68%" style label of a ratio to the baseline.
std::string format_delta_pct(double pct);

void write_report_csv(std::ostream& os, const MetricsReport& report);
// mechanism,regime,metric,value,stderr rows.
void write_long_csv(std::ostream& os, const MetricsReport& report);
nlohmann::json report_to_json(const MetricsReport& report);

}  // namespace ibpa
