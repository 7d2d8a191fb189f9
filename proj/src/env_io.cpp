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

#include "ibpa/env_io.hpp"

#include <fstream>
#include <map>

namespace ibpa {

using nlohmann::json;

namespace {

std::vector<double> read_vector(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw InvalidInput(std::string("environment file is missing '") + key + "'");
  }
  return doc.at(key).get<std::vector<double>>();
}

Partition read_partition(const json& doc) {
  return Partition(doc.get<std::vector<std::size_t>>());
}

}  // namespace

ValuationPrior prior_from_json(const json& doc, std::size_t types) {
  const std::string label = doc.value("label", std::string{});
  ValuationPrior prior = [&] {
    if (doc.contains("atoms")) {
      auto atoms = doc.at("atoms").get<std::vector<std::vector<double>>>();
      std::vector<double> weights;
      if (doc.contains("weights")) {
        weights = doc.at("weights").get<std::vector<double>>();
      } else {
        weights.assign(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
      }
      return ValuationPrior::discrete(atoms, std::move(weights), label);
    }
    if (doc.contains("samples")) {
      return ValuationPrior::from_samples(
          doc.at("samples").get<std::vector<std::vector<double>>>(), label);
    }
    throw InvalidInput("prior needs 'atoms' or 'samples'");
  }();
  if (prior.type_count() != types) {
    throw InvalidInput("prior dimension does not match the number of types");
  }
  return prior;
}

json prior_to_json(const ValuationPrior& prior) {
  std::vector<std::vector<double>> rows(prior.atom_count());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto a = prior.atom(i);
    rows[i].assign(a.begin(), a.end());
  }
  json doc;
  if (!prior.label().empty()) doc["label"] = prior.label();
  if (prior.kind() == ValuationPrior::Kind::kSampled) {
    doc["samples"] = rows;
  } else {
    doc["atoms"] = rows;
    doc["weights"] = std::vector<double>(prior.weights().begin(), prior.weights().end());
  }
  return doc;
}

EnvironmentFile parse_environment(const json& doc) {
  auto probs = read_vector(doc, "inventory_probs");
  auto alpha = read_vector(doc, "slot_effects");
  std::vector<double> beta = doc.contains("type_effects")
                                 ? read_vector(doc, "type_effects")
                                 : std::vector<double>(probs.size(), 1.0);
  if (!doc.contains("advertisers")) {
    throw InvalidInput("environment file is missing 'advertisers'");
  }
  std::vector<double> gamma;
  std::vector<PriorPtr> priors;
  // Advertisers with identical prior documents share one prior object.
  std::map<std::string, PriorPtr> shared;
  for (const auto& adv : doc.at("advertisers")) {
    gamma.push_back(adv.value("gamma", 1.0));
    const json& p = adv.at("prior");
    const std::string key = p.dump();
    auto it = shared.find(key);
    if (it == shared.end()) {
      auto ptr = std::make_shared<const ValuationPrior>(prior_from_json(p, probs.size()));
      it = shared.emplace(key, ptr).first;
    }
    priors.push_back(it->second);
  }
  EnvironmentFile out{AuctionEnvironment(InventoryDistribution(std::move(probs)),
                                         CtrModel(std::move(alpha), std::move(beta),
                                                  std::move(gamma)),
                                         std::move(priors)),
                      std::nullopt};
  if (doc.contains("partitions")) {
    const json& parts = doc.at("partitions");
    out.regime.emplace(read_partition(parts.at("info")),
                       read_partition(parts.at("disc")));
  }
  return out;
}

json environment_to_json(const AuctionEnvironment& env,
                         const std::optional<Regime>& regime) {
  json doc;
  const auto& ctr = env.ctr();
  doc["inventory_probs"] =
      std::vector<double>(env.inventory().probs().begin(), env.inventory().probs().end());
  doc["slot_effects"] =
      std::vector<double>(ctr.slot_effects().begin(), ctr.slot_effects().end());
  doc["type_effects"] =
      std::vector<double>(ctr.type_effects().begin(), ctr.type_effects().end());
  json advs = json::array();
  for (std::size_t a = 0; a < env.advertiser_count(); ++a) {
    advs.push_back({{"gamma", ctr.gamma(a)}, {"prior", prior_to_json(env.prior(a))}});
  }
  doc["advertisers"] = std::move(advs);
  if (regime) {
    doc["partitions"] = {
        {"info", std::vector<std::size_t>(regime->info.labels().begin(),
                                          regime->info.labels().end())},
        {"disc", std::vector<std::size_t>(regime->disc.labels().begin(),
                                          regime->disc.labels().end())}};
  }
  return doc;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

EnvironmentFile load_environment(const std::filesystem::path& path) {
  try {
    return parse_environment(read_json_file(path));
  } catch (const json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

}  // namespace ibpa
