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

#include "ibpa/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <variant>

#include "ibpa/parallel.hpp"

namespace ibpa {
namespace {

bool is_full(const Partition& p) { return p.block_count() == p.type_count(); }
bool is_null(const Partition& p) { return p.block_count() == 1; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Partition partition_from_json(const nlohmann::json& j) {
  return Partition(j.get<std::vector<std::size_t>>());
}

struct Accumulator {
  std::size_t n = 0;
  double rev = 0, rev2 = 0, adv = 0, adv2 = 0, tot = 0, tot2 = 0, sold = 0;

  void add(const MechanismOutcome& o) {
    const double a = o.advertiser_welfare();
    const double t = o.revenue + a;
    ++n;
    rev += o.revenue;
    rev2 += o.revenue * o.revenue;
    adv += a;
    adv2 += a * a;
    tot += t;
    tot2 += t * t;
    sold += o.any_assigned() ? 1.0 : 0.0;
  }
  void merge(const Accumulator& b) {
    n += b.n;
    rev += b.rev;
    rev2 += b.rev2;
    adv += b.adv;
    adv2 += b.adv2;
    tot += b.tot;
    tot2 += b.tot2;
    sold += b.sold;
  }
  MechanismMetrics metrics() const {
    MechanismMetrics m;
    m.n = n;
    if (n == 0) return m;
    const double dn = static_cast<double>(n);
    auto mean_se = [&](double s, double s2, double& mean, double& se) {
      mean = s / dn;
      const double var = n > 1 ? std::max(0.0, (s2 - dn * mean * mean) / (dn - 1.0)) : 0.0;
      se = std::sqrt(var / dn);
    };
    mean_se(rev, rev2, m.revenue, m.revenue_se);
    mean_se(adv, adv2, m.adv_welfare, m.adv_welfare_se);
    mean_se(tot, tot2, m.total_welfare, m.total_welfare_se);
    mean_se(sold, sold, m.alloc_rate, m.alloc_rate_se);
    return m;
  }
};

AuctionEnvironment with_slots(const AuctionEnvironment& env, std::optional<std::size_t> slots) {
  if (!slots || *slots == env.slot_count()) return env;
  if (*slots == 0 || *slots > env.slot_count()) {
    throw InvalidInput("slot_count must be between 1 and the environment's slots");
  }
  const auto a = env.ctr().slot_effects();
  const auto b = env.ctr().type_effects();
  const auto g = env.ctr().advertiser_quality();
  return AuctionEnvironment(env.inventory(),
                            CtrModel(std::vector<double>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(*slots)),
                                     std::vector<double>(b.begin(), b.end()),
                                     std::vector<double>(g.begin(), g.end())),
                            env.priors());
}

using Runner = std::variant<IbpaArtifacts, GspConfig>;

MenuClass menu_class_of(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kIbpaBinary:
      return MenuClass::kBinary;
    case MechanismKind::kIbpaAdditive:
      return MenuClass::kAdditive;
    default:
      return MenuClass::kFull;
  }
}

}  // namespace

std::string regime_label(const Regime& regime) {
  std::string info = is_full(regime.info) ? "FI" : is_null(regime.info) ? "NI" : "";
  std::string disc = is_full(regime.disc) ? "FD" : is_null(regime.disc) ? "ND" : "";
  if (info.empty() || disc.empty()) return regime.describe();
  return info + "-" + disc;
}

std::string mechanism_name(const MechanismSpec& spec) {
  if (!spec.name.empty()) return spec.name;
  std::string base;
  switch (spec.kind) {
    case MechanismKind::kIbpa:
      base = "IBPA";
      break;
    case MechanismKind::kIbpaBinary:
      base = "IBPA_bin";
      break;
    case MechanismKind::kIbpaAdditive:
      base = "IBPA_add";
      break;
    case MechanismKind::kGsp:
      base = "GSP";
      break;
  }
  return base + "-" + regime_label(spec.regime);
}

MechanismSpec parse_mechanism(std::string_view name, std::size_t types) {
  const std::string s = lower(name);
  const auto dash = s.find('-');
  const auto dash2 = dash == std::string::npos ? std::string::npos : s.find('-', dash + 1);
  if (dash2 == std::string::npos) {
    throw InvalidInput("mechanism must look like ibpa-fi-nd: " + std::string(name));
  }
  const std::string kind = s.substr(0, dash);
  const std::string info = s.substr(dash + 1, dash2 - dash - 1);
  const std::string disc = s.substr(dash2 + 1);
  MechanismSpec spec;
  if (kind == "ibpa") {
    spec.kind = MechanismKind::kIbpa;
  } else if (kind == "ibpa_bin" || kind == "ibpabin") {
    spec.kind = MechanismKind::kIbpaBinary;
  } else if (kind == "ibpa_add" || kind == "ibpaadd") {
    spec.kind = MechanismKind::kIbpaAdditive;
  } else if (kind == "gsp") {
    spec.kind = MechanismKind::kGsp;
  } else {
    throw InvalidInput("unknown mechanism kind: " + kind);
  }
  auto part = [&](const std::string& code, char full, char none) {
    if (code.size() == 2 && code[0] == full) return Partition::full(types);
    if (code.size() == 2 && code[0] == none) return Partition::null(types);
    throw InvalidInput("unknown partition code: " + code);
  };
  if (info.size() != 2 || info[1] != 'i' || disc.size() != 2 || disc[1] != 'd') {
    throw InvalidInput("mechanism must look like ibpa-fi-nd: " + std::string(name));
  }
  spec.regime = Regime(part(info, 'f', 'n'), part(disc, 'f', 'n'));
  return spec;
}

SimulationConfig simulation_config_from_json(const nlohmann::json& doc, std::size_t types) {
  SimulationConfig cfg;
  cfg.n_auctions = doc.value("n_auctions", cfg.n_auctions);
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.threads = doc.value("threads", cfg.threads);
  cfg.baseline = doc.value("baseline", cfg.baseline);
  cfg.keep_outcomes = doc.value("keep_outcomes", cfg.keep_outcomes);
  if (doc.contains("slot_count")) cfg.slot_count = doc.at("slot_count").get<std::size_t>();
  if (doc.contains("participation")) {
    const auto& p = doc.at("participation");
    cfg.participation.min_count = p.value("min", std::size_t{0});
    cfg.participation.max_count = p.value("max", cfg.participation.min_count);
  }
  cfg.ibpa.curve.grid_size = doc.value("grid", cfg.ibpa.curve.grid_size);
  cfg.ibpa.mc_samples = doc.value("mc_samples", cfg.ibpa.mc_samples);
  if (doc.contains("quantile_mode")) {
    const auto mode = doc.at("quantile_mode").get<std::string>();
    if (mode == "nested") {
      cfg.ibpa.quantile_mode = QuantileMode::kNested;
    } else if (mode == "interim") {
      cfg.ibpa.quantile_mode = QuantileMode::kInterim;
    } else {
      throw InvalidInput("quantile_mode must be 'nested' or 'interim'");
    }
  }
  cfg.ibpa.seed = doc.value("artifact_seed", cfg.seed);
  if (doc.contains("solver")) {
    const auto& s = doc.at("solver");
    SolverConfig& sc = cfg.ibpa.curve.solver;
    sc.population = s.value("population", sc.population);
    sc.parents = s.value("parents", sc.parents);
    sc.elites = s.value("elites", sc.elites);
    sc.crossover_rate = s.value("crossover_rate", sc.crossover_rate);
    sc.mutation_rate = s.value("mutation_rate", sc.mutation_rate);
    sc.max_generations = s.value("max_generations", sc.max_generations);
    sc.stall_generations = s.value("stall_generations", sc.stall_generations);
    sc.max_items = s.value("max_items", sc.max_items);
    sc.penalty_weight = s.value("penalty_weight", sc.penalty_weight);
    sc.polish = s.value("polish", sc.polish);
    sc.exact_single_type = s.value("exact_single_type", sc.exact_single_type);
  }
  cfg.ibpa.curve.hierarchical = doc.value("hierarchical", cfg.ibpa.curve.hierarchical);
  if (doc.contains("gsp")) {
    const auto& g = doc.at("gsp");
    cfg.gsp_reserve = g.value("reserve", cfg.gsp_reserve);
    if (g.contains("equilibrium")) {
      cfg.gsp_equilibrium = parse_gsp_equilibrium(g.at("equilibrium").get<std::string>());
    }
  }
  const std::vector<std::string> defaults = {"IBPA-FI-ND", "IBPA-FI-FD", "IBPA-NI-ND",
                                             "GSP-FI-FD", "GSP-NI-ND"};
  if (!doc.contains("mechanisms")) {
    for (const auto& n : defaults) cfg.mechanisms.push_back(parse_mechanism(n, types));
  } else {
    for (const auto& m : doc.at("mechanisms")) {
      if (m.is_string()) {
        cfg.mechanisms.push_back(parse_mechanism(m.get<std::string>(), types));
        continue;
      }
      MechanismSpec spec = parse_mechanism(m.value("kind", std::string("ibpa")) + "-fi-nd", types);
      if (m.contains("info") || m.contains("disc")) {
        Partition info = m.contains("info") ? partition_from_json(m.at("info")) : Partition::full(types);
        Partition disc = m.contains("disc") ? partition_from_json(m.at("disc")) : Partition::null(types);
        spec.regime = Regime(std::move(info), std::move(disc));
      }
      spec.name = m.value("name", std::string{});
      cfg.mechanisms.push_back(std::move(spec));
    }
  }
  if (cfg.n_auctions == 0) throw InvalidInput("n_auctions must be at least 1");
  return cfg;
}

MechanismMetrics welfare_metrics(std::span<const MechanismOutcome> outcomes) {
  Accumulator acc;
  for (const auto& o : outcomes) acc.add(o);
  return acc.metrics();
}

PairedDifference paired_revenue_difference(const MetricsReport& report, std::size_t i,
                                           std::size_t j) {
  const auto& a = report.revenues.at(i);
  const auto& b = report.revenues.at(j);
  const std::size_t n = a.size();
  if (n == 0 || b.size() != n) throw InvalidInput("revenue streams do not line up");
  double s = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a[k] - b[k];
    s += d;
    s2 += d * d;
  }
  const double dn = static_cast<double>(n);
  PairedDifference out;
  out.mean = s / dn;
  if (n > 1) out.se = std::sqrt(std::max(0.0, (s2 - dn * out.mean * out.mean) / (dn - 1.0)) / dn);
  return out;
}

MetricsReport run_comparison(const AuctionEnvironment& base_env, const SimulationConfig& cfg) {
  if (cfg.n_auctions == 0) throw InvalidInput("n_auctions must be at least 1");
  if (cfg.mechanisms.empty()) throw InvalidInput("no mechanisms to compare");
  const AuctionEnvironment env = with_slots(base_env, cfg.slot_count);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  std::vector<Runner> runners;
  for (const auto& spec : cfg.mechanisms) {
    const std::string name = mechanism_name(spec);
    try {
      if (spec.kind == MechanismKind::kGsp) {
        runners.emplace_back(GspConfig{spec.regime, cfg.gsp_reserve, cfg.gsp_equilibrium});
      } else {
        IbpaConfig ic = cfg.ibpa;
        ic.curve.menu_class = menu_class_of(spec.kind);
        ic.participation = cfg.participation;
        ic.threads = cfg.threads;
        runners.emplace_back(IbpaArtifacts::build(env, spec.regime, ic));
      }
    } catch (const RegimeError&) {
      throw;
    } catch (const std::exception& e) {
      throw ArtifactError("ibpa_mechanism: building " + name + " failed: " + e.what());
    }
  }
  const auto t1 = clock::now();

  const std::size_t M = runners.size();
  const std::size_t n = cfg.n_auctions;
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::vector<Accumulator>> partial(chunks, std::vector<Accumulator>(M));
  MetricsReport report;
  report.revenues.assign(M, std::vector<double>(n));
  if (cfg.keep_outcomes) report.outcomes.assign(M, std::vector<MechanismOutcome>(n));

  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const AuctionInstance inst =
          sample_auction(env, derive_seed(cfg.seed, streams::kInstance, i), cfg.participation);
      for (std::size_t m = 0; m < M; ++m) {
        MechanismOutcome o = std::holds_alternative<IbpaArtifacts>(runners[m])
                                 ? run_ibpa(std::get<IbpaArtifacts>(runners[m]), inst)
                                 : run_gsp(env, std::get<GspConfig>(runners[m]), inst);
        partial[c][m].add(o);
        report.revenues[m][i] = o.revenue;
        if (cfg.keep_outcomes) report.outcomes[m][i] = std::move(o);
      }
    }
  });

  for (std::size_t m = 0; m < M; ++m) {
    Accumulator acc;
    for (std::size_t c = 0; c < chunks; ++c) acc.merge(partial[c][m]);
    MechanismMetrics row = acc.metrics();
    row.mechanism = mechanism_name(cfg.mechanisms[m]);
    row.regime = cfg.mechanisms[m].regime.describe();
    report.rows.push_back(std::move(row));
  }
  report.build_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.run_seconds = std::chrono::duration<double>(clock::now() - t1).count();
  apply_baseline(report, cfg.baseline);
  return report;
}

void apply_baseline(MetricsReport& report, const std::string& baseline) {
  auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const auto& r) {
    return lower(r.mechanism) == lower(baseline);
  });
  if (it == report.rows.end()) return;
  report.baseline = it->mechanism;
  const MechanismMetrics base = *it;
  auto pct = [](double x, double b) -> std::optional<double> {
    if (b == 0.0) return std::nullopt;
    return 100.0 * (x - b) / std::abs(b);
  };
  for (auto& r : report.rows) {
    r.revenue_delta_pct = pct(r.revenue, base.revenue);
    r.adv_welfare_delta_pct = pct(r.adv_welfare, base.adv_welfare);
    r.total_welfare_delta_pct = pct(r.total_welfare, base.total_welfare);
    r.alloc_rate_delta_pp = 100.0 * (r.alloc_rate - base.alloc_rate);
  }
}

std::string format_delta_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.0f%%", pct);
  return buf;
}

namespace {
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}
std::string opt(const std::optional<double>& x) { return x ? num(*x) : std::string{}; }
std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

void write_report_csv(std::ostream& os, const MetricsReport& report) {
  os << "mechanism,regime,revenue,adv_welfare,total_welfare,alloc_rate,"
        "stderr_revenue,stderr_adv_welfare,stderr_total_welfare,stderr_alloc_rate,"
        "n,revenue_delta_pct,adv_welfare_delta_pct,total_welfare_delta_pct,alloc_rate_delta_pp\n";
  for (const auto& r : report.rows) {
    os << quoted(r.mechanism) << ',' << quoted(r.regime) << ',' << num(r.revenue) << ','
       << num(r.adv_welfare) << ',' << num(r.total_welfare) << ',' << num(r.alloc_rate) << ','
       << num(r.revenue_se) << ',' << num(r.adv_welfare_se) << ',' << num(r.total_welfare_se)
       << ',' << num(r.alloc_rate_se) << ',' << r.n << ',' << opt(r.revenue_delta_pct) << ','
       << opt(r.adv_welfare_delta_pct) << ',' << opt(r.total_welfare_delta_pct) << ','
       << opt(r.alloc_rate_delta_pp) << '\n';
  }
}

void write_long_csv(std::ostream& os, const MetricsReport& report) {
  os << "mechanism,regime,metric,value,stderr\n";
  for (const auto& r : report.rows) {
    const std::pair<const char*, std::pair<double, double>> items[] = {
        {"revenue", {r.revenue, r.revenue_se}},
        {"adv_welfare", {r.adv_welfare, r.adv_welfare_se}},
        {"total_welfare", {r.total_welfare, r.total_welfare_se}},
        {"alloc_rate", {r.alloc_rate, r.alloc_rate_se}}};
    for (const auto& [metric, vs] : items) {
      os << quoted(r.mechanism) << ',' << quoted(r.regime) << ',' << metric << ','
         << num(vs.first) << ',' << num(vs.second) << '\n';
    }
  }
}

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j = {{"mechanism", r.mechanism},
                        {"regime", r.regime},
                        {"n", r.n},
                        {"revenue", r.revenue},
                        {"stderr_revenue", r.revenue_se},
                        {"adv_welfare", r.adv_welfare},
                        {"stderr_adv_welfare", r.adv_welfare_se},
                        {"total_welfare", r.total_welfare},
                        {"stderr_total_welfare", r.total_welfare_se},
                        {"alloc_rate", r.alloc_rate},
                        {"stderr_alloc_rate", r.alloc_rate_se}};
    if (r.revenue_delta_pct) j["revenue_delta"] = format_delta_pct(*r.revenue_delta_pct);
    if (r.adv_welfare_delta_pct) j["adv_welfare_delta"] = format_delta_pct(*r.adv_welfare_delta_pct);
    if (r.total_welfare_delta_pct) {
      j["total_welfare_delta"] = format_delta_pct(*r.total_welfare_delta_pct);
    }
    if (r.alloc_rate_delta_pp) j["alloc_rate_delta_pp"] = *r.alloc_rate_delta_pp;
    rows.push_back(std::move(j));
  }
  return {{"baseline", report.baseline},
          {"build_seconds", report.build_seconds},
          {"run_seconds", report.run_seconds},
          {"mechanisms", std::move(rows)}};
}

}  // namespace ibpa
