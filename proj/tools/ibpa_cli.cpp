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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ibpa/env_io.hpp"
#include "ibpa/estimation.hpp"
#include "ibpa/revenue_curve.hpp"
#include "ibpa/simulator.hpp"

using namespace ibpa;
using nlohmann::json;

namespace {

void emit(const json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json_file(out, doc);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write " + path);
  return os;
}

struct SimArgs {
  std::string env, config, outcomes, report, long_report, baseline;
  std::size_t n = 0;
  std::size_t threads = 0;
  bool threads_set = false;
};

SimulationConfig load_sim_config(const SimArgs& a, const AuctionEnvironment& env) {
  json doc = a.config.empty() ? json::object() : read_json_file(a.config);
  SimulationConfig cfg = simulation_config_from_json(doc, env.type_count());
  if (a.n > 0) cfg.n_auctions = a.n;
  if (a.threads_set) cfg.threads = a.threads;
  if (!a.baseline.empty()) cfg.baseline = a.baseline;
  cfg.keep_outcomes = !a.outcomes.empty();
  return cfg;
}

void write_reports(const SimArgs& a, const MetricsReport& report) {
  if (!a.report.empty()) {
    auto os = open_out(a.report);
    write_report_csv(os, report);
  }
  if (!a.long_report.empty()) {
    auto os = open_out(a.long_report);
    write_long_csv(os, report);
  }
  if (!a.outcomes.empty()) {
    auto os = open_out(a.outcomes);
    for (std::size_t m = 0; m < report.outcomes.size(); ++m) {
      for (const auto& o : report.outcomes[m]) {
        json line = outcome_to_json(o);
        line["mechanism"] = report.rows[m].mechanism;
        os << line.dump() << '\n';
      }
    }
  }
}

void add_sim_options(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--env", a.env, "environment JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--config", a.config, "simulation JSON")->check(CLI::ExistingFile);
  cmd->add_option("-n,--auctions", a.n, "number of auctions (overrides the config)");
  cmd->add_option_function<std::size_t>(
      "--threads", [&a](std::size_t t) { a.threads = t; a.threads_set = true; },
      "worker threads, 0 for all cores");
  cmd->add_option("--outcomes", a.outcomes, "JSON-lines outcome stream");
  cmd->add_option("--long", a.long_report, "long-format CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-bundling position auctions: estimation, curves and simulation"};
  app.require_subcommand(1);

  std::string panel, out;
  bool no_correction = false, unweighted = false;
  auto* ctr = app.add_subcommand("estimate-ctr", "slot and advertiser effects from a click panel");
  ctr->add_option("--panel", panel, "CSV advertiser,slot,day,impressions,clicks")
      ->required()
      ->check(CLI::ExistingFile);
  ctr->add_flag("--no-correction", no_correction, "drop zero-click rows instead of adding 0.5");
  ctr->add_flag("--unweighted", unweighted, "do not weight rows by impressions");
  ctr->add_option("--out", out, "output JSON (stdout when omitted)");

  std::string log_path, ctr_path;
  std::vector<double> alpha;
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  auto* vals = app.add_subcommand("estimate-values", "valuation distributions from bids");
  vals->add_option("--log", log_path, "CSV auction_id,type,slot_count,advertiser,gamma,bid")
      ->required()
      ->check(CLI::ExistingFile);
  auto* alpha_opt = vals->add_option("--alpha", alpha, "slot effects")->delimiter(',');
  vals->add_option("--ctr", ctr_path, "output of estimate-ctr")
      ->check(CLI::ExistingFile)
      ->excludes(alpha_opt);
  vals->add_option("--samples", samples, "draws in the output prior");
  vals->add_option("--seed", seed, "seed for the prior draws");
  vals->add_option("--out", out, "output JSON (stdout when omitted)");

  std::string env_path, menu_class = "full";
  std::size_t grid = 50;
  auto* curves = app.add_subcommand("build-curves", "revenue curves for every advertiser");
  curves->add_option("--env", env_path, "environment JSON")->required()->check(CLI::ExistingFile);
  curves->add_option("--class", menu_class, "full, binary or additive");
  curves->add_option("--grid", grid, "grid points on [0,1]");
  curves->add_option("--seed", seed, "solver seed");
  curves->add_option("--out", out, "output JSON (stdout when omitted)");

  SimArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "run mechanisms on sampled auctions");
  add_sim_options(sim, sim_args);
  sim->add_option("--report", sim_args.report, "report CSV");
  sim->add_option("--out", out, "summary JSON (stdout when omitted)");

  SimArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "report CSV with deltas against a baseline");
  add_sim_options(cmp, cmp_args);
  cmp->add_option("--baseline", cmp_args.baseline, "baseline mechanism, e.g. gsp-fi-fd");
  cmp->add_option("--out", cmp_args.report, "report CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ctr) {
      SlotEffectOptions opts;
      if (no_correction) opts.zero_click_correction = 0.0;
      opts.weight_by_impressions = !unweighted;
      emit(slot_effects_to_json(estimate_slot_effects(read_panel_csv(panel), opts)), out);
    } else if (*vals) {
      if (!ctr_path.empty()) {
        alpha = read_json_file(ctr_path).at("slot_effects").get<std::vector<double>>();
      }
      if (alpha.empty()) throw InvalidInput("pass --alpha or --ctr");
      const auto est = estimate_valuations(read_auction_log_csv(log_path), alpha);
      json doc = valuations_to_json(est);
      doc["prior"] = prior_to_json(prior_from_marginals(est.per_type, samples, seed));
      emit(doc, out);
    } else if (*curves) {
      const EnvironmentFile file = load_environment(env_path);
      const AuctionEnvironment& env = file.env;
      CurveConfig cc;
      cc.grid_size = grid;
      cc.menu_class = parse_menu_class(menu_class);
      cc.solver.seed = seed;
      const auto beta = env.ctr().type_effects();
      json doc = {{"class", to_string(cc.menu_class)}, {"curves", json::array()}};
      std::vector<const ValuationPrior*> done;
      for (std::size_t a = 0; a < env.advertiser_count(); ++a) {
        if (std::find(done.begin(), done.end(), &env.prior(a)) != done.end()) continue;
        done.push_back(&env.prior(a));
        const RevenueCurve curve = build_curve(env.prior(a), env.inventory(), beta, cc);
        doc["curves"].push_back(curve_to_json(curve, a));
        std::cerr << "advertiser " << a + 1 << ": Phi(1) = " << curve.value(1.0)
                  << ", saturation " << curve.saturation() << '\n';
      }
      emit(doc, out);
    } else {
      const bool compare = static_cast<bool>(*cmp);
      const SimArgs& args = compare ? cmp_args : sim_args;
      const EnvironmentFile file = load_environment(args.env);
      const SimulationConfig cfg = load_sim_config(args, file.env);
      const MetricsReport report = run_comparison(file.env, cfg);
      write_reports(args, report);
      if (!compare) emit(report_to_json(report), out);
      for (const auto& r : report.rows) {
        std::cerr << r.mechanism << ": revenue " << r.revenue << " +- " << r.revenue_se;
        if (r.revenue_delta_pct) std::cerr << " (" << format_delta_pct(*r.revenue_delta_pct) << ")";
        std::cerr << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
