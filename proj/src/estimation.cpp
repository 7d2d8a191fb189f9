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

#include "ibpa/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "ibpa/isotonic.hpp"
#include "ibpa/rng.hpp"

namespace ibpa {
namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

// Slots and advertisers are linked when a row observes them together; the
// effects are identified only if that graph is connected.
void check_connected(std::span<const CtrPanelRow> rows, std::size_t S, std::size_t A) {
  std::vector<std::size_t> parent(S + A);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& r : rows) {
    parent[find_root(parent, r.slot)] = find_root(parent, S + r.advertiser);
  }
  std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> comps;
  for (std::size_t s = 0; s < S; ++s) comps[find_root(parent, s)].first.push_back(s + 1);
  for (std::size_t a = 0; a < A; ++a) comps[find_root(parent, S + a)].second.push_back(a + 1);
  if (comps.size() <= 1) return;
  std::ostringstream msg;
  msg << "slot and advertiser effects are not identified: " << comps.size()
      << " disconnected components";
  for (const auto& [root, members] : comps) {
    msg << " {slots";
    for (auto s : members.first) msg << ' ' << s;
    msg << "; advertisers";
    for (auto a : members.second) msg << ' ' << a;
    msg << '}';
  }
  throw IdentifiabilityError(msg.str());
}

struct LogRow {
  std::size_t slot, advertiser;
  double y, w;
};

double icc_at(std::span<const double> scores, std::span<const double> a, std::size_t k) {
  auto sc = [&](std::size_t i) { return i < scores.size() ? scores[i] : 0.0; };
  const double hi = a[k];
  const double lo = k + 1 < a.size() ? a[k + 1] : 0.0;
  return (sc(k + 1) * hi - sc(k + 2) * lo) / (hi - lo);
}

std::size_t boundary_count(std::span<const double> scores, std::span<const double> alpha) {
  return std::min(scores.size(), alpha.size());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

// Header-indexed CSV rows.
class CsvTable {
 public:
  CsvTable(std::istream& in, std::initializer_list<const char*> required) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty CSV input");
    const auto header = split_csv_line(line);
    for (const char* name : required) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw InvalidInput(std::string("CSV is missing column ") + name);
      cols_[name] = static_cast<std::size_t>(it - header.begin());
    }
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      rows_.push_back(split_csv_line(line));
      if (rows_.back().size() < header.size()) {
        throw InvalidInput("CSV row " + std::to_string(rows_.size() + 1) + " is short");
      }
    }
  }

  std::size_t size() const { return rows_.size(); }
  const std::string& text(std::size_t r, const char* col) const {
    return rows_[r][cols_.at(col)];
  }
  double number(std::size_t r, const char* col) const {
    const std::string& s = text(r, col);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InvalidInput("CSV row " + std::to_string(r + 2) + ": bad number '" + s + "' in " + col);
    }
  }
  std::size_t index(std::size_t r, const char* col) const {
    const double v = number(r, col);
    if (v < 1 || v != std::floor(v)) {
      throw InvalidInput("CSV row " + std::to_string(r + 2) + ": " + col + " must be a positive integer");
    }
    return static_cast<std::size_t>(v) - 1;
  }

 private:
  std::map<std::string, std::size_t> cols_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace

SlotEffectEstimate estimate_slot_effects(std::span<const CtrPanelRow> panel,
                                         const SlotEffectOptions& opts) {
  std::vector<LogRow> rows;
  std::vector<CtrPanelRow> used;
  std::size_t S = 0, A = 0;
  for (const auto& r : panel) {
    if (r.impressions <= 0.0) continue;
    if (r.clicks < 0.0 || r.clicks > r.impressions) {
      throw InvalidInput("panel row with clicks outside [0, impressions]");
    }
    double clicks = r.clicks;
    if (clicks == 0.0) {
      if (opts.zero_click_correction <= 0.0) continue;
      clicks = opts.zero_click_correction;
    }
    rows.push_back({r.slot, r.advertiser, std::log(clicks / r.impressions),
                    opts.weight_by_impressions ? r.impressions : 1.0});
    used.push_back(r);
    S = std::max(S, r.slot + 1);
    A = std::max(A, r.advertiser + 1);
  }
  if (rows.empty()) throw InvalidInput("panel has no usable rows");
  check_connected(used, S, A);

  // Unknowns: log alpha_2..S, then log gamma_1..A.
  const std::size_t P = (S - 1) + A;
  Eigen::MatrixXd XtX = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
  Eigen::VectorXd Xty = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P));
  for (const auto& r : rows) {
    std::vector<Eigen::Index> cols;
    if (r.slot > 0) cols.push_back(static_cast<Eigen::Index>(r.slot - 1));
    cols.push_back(static_cast<Eigen::Index>(S - 1 + r.advertiser));
    for (auto i : cols) {
      Xty(i) += r.w * r.y;
      for (auto j : cols) XtX(i, j) += r.w;
    }
  }
  const Eigen::VectorXd beta = XtX.ldlt().solve(Xty);

  std::vector<double> log_alpha(S, 0.0);
  std::vector<double> slot_weight(S, 0.0);
  for (std::size_t s = 1; s < S; ++s) log_alpha[s] = beta(static_cast<Eigen::Index>(s - 1));
  for (const auto& r : rows) slot_weight[r.slot] += r.w;
  log_alpha = isotonic_nonincreasing(log_alpha, slot_weight);
  const double shift = log_alpha[0];
  for (auto& la : log_alpha) la -= shift;

  // Refit advertiser effects given the projected slot effects.
  std::vector<double> num(A, 0.0), den(A, 0.0);
  for (const auto& r : rows) {
    num[r.advertiser] += r.w * (r.y - log_alpha[r.slot]);
    den[r.advertiser] += r.w;
  }
  SlotEffectEstimate est;
  est.rows_used = rows.size();
  for (double la : log_alpha) est.alpha.push_back(std::exp(la));
  std::vector<double> log_gamma(A);
  for (std::size_t a = 0; a < A; ++a) {
    log_gamma[a] = num[a] / den[a];
    est.gamma.push_back(std::exp(log_gamma[a]));
  }
  double wsum = 0.0, ybar = 0.0;
  for (const auto& r : rows) {
    wsum += r.w;
    ybar += r.w * r.y;
  }
  ybar /= wsum;
  double ssr = 0.0, sst = 0.0;
  for (const auto& r : rows) {
    const double fit = log_alpha[r.slot] + log_gamma[r.advertiser];
    ssr += r.w * (r.y - fit) * (r.y - fit);
    sst += r.w * (r.y - ybar) * (r.y - ybar);
  }
  est.r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  return est;
}

IccSequence compute_icc(std::span<const double> scores, std::span<const double> alpha) {
  const std::size_t S = boundary_count(scores, alpha);
  IccSequence out;
  for (std::size_t k = 0; k < S; ++k) {
    const double lo = k + 1 < alpha.size() ? alpha[k + 1] : 0.0;
    if (!(alpha[k] > lo)) {
      throw InvalidInput("ICC undefined: slots " + std::to_string(k + 1) + " and " +
                         std::to_string(k + 2) + " have equal slot effects");
    }
    out.icc.push_back(icc_at(scores, alpha, k));
  }
  out.weights.assign(S, 1.0);
  return out;
}

std::vector<double> weighted_icc(std::span<const double> scores,
                                 std::span<const double> alpha,
                                 std::span<const double> d) {
  std::vector<double> a(alpha.begin(), alpha.end());
  for (std::size_t k = 0; k < d.size() && k < a.size(); ++k) a[k] *= d[k];
  std::vector<double> out;
  for (std::size_t k = 0; k < boundary_count(scores, alpha); ++k) out.push_back(icc_at(scores, a, k));
  return out;
}

IccSequence monotonize_icc(std::span<const double> scores, std::span<const double> alpha) {
  IccSequence raw = compute_icc(scores, alpha);
  const std::size_t S = raw.icc.size();
  auto ordered = [](const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k] > v[k - 1]) return false;
    }
    return true;
  };
  if (ordered(raw.icc)) return raw;

  double scale = 0.0;
  for (double v : raw.icc) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, 1e-300);
  constexpr double kPenalty = 1e6;
  // Violation of the ordering, plus infinity where a denominator is not positive.
  auto violation = [&](const std::vector<double>& d) {
    for (std::size_t k = 0; k < S; ++k) {
      const double next = k + 1 < alpha.size() ? alpha[k + 1] * (k + 1 < S ? d[k + 1] : 1.0) : 0.0;
      if (!(alpha[k] * d[k] - next > 1e-12 * alpha[k])) return HUGE_VAL;
    }
    const auto w = weighted_icc(scores, alpha, d);
    double v = 0.0;
    for (std::size_t k = 1; k < S; ++k) v += std::max(0.0, w[k] - w[k - 1]);
    return v / scale;
  };
  auto objective = [&](const std::vector<double>& d) {
    double f = 0.0;
    for (double x : d) f += 1.0 - x * x;
    return f + kPenalty * violation(d);
  };

  // Pattern search over coordinate and adjacent-pair moves. The feasible set
  // is not convex, so restart from d = 1 and a few fixed pseudo-random points.
  auto search = [&](std::vector<double> d) {
    double best = objective(d);
    for (double h = 0.25; h > 1e-9; h *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t i = 0; i < S; ++i) {
          for (std::size_t j = i; j < std::min(S, i + 2); ++j) {
            for (int si : {-1, 1}) {
              for (int sj : {-1, 1}) {
                if (j == i && sj == 1) continue;
                std::vector<double> trial = d;
                trial[i] = std::clamp(trial[i] + si * h, 0.0, 1.0);
                if (j != i) trial[j] = std::clamp(trial[j] + sj * h, 0.0, 1.0);
                const double f = objective(trial);
                if (f < best - 1e-15) {
                  best = f;
                  d = std::move(trial);
                  improved = true;
                }
              }
            }
          }
        }
      }
    }
    return std::pair{best, d};
  };
  auto [best, d] = search(std::vector<double>(S, 1.0));
  Rng rng(0x1cc);
  for (int start = 0; start < 6; ++start) {
    std::vector<double> d0(S);
    for (auto& x : d0) x = 0.5 + 0.5 * uniform01(rng);
    auto [f, cand] = search(std::move(d0));
    if (f < best) {
      best = f;
      d = std::move(cand);
    }
  }

  IccSequence out;
  if (violation(d) <= 1e-9) {
    out.icc = weighted_icc(scores, alpha, d);
    out.weights = d;
  } else {
    out.icc = isotonic_nonincreasing(raw.icc);
    out.weights.assign(S, 1.0);
    out.fallback = true;
  }
  // Remove rounding-level residue so the sequence is exactly ordered.
  for (std::size_t k = 1; k < S; ++k) out.icc[k] = std::min(out.icc[k], out.icc[k - 1]);
  return out;
}

IntervalObservation valuation_bounds(std::span<const double> monotone_icc,
                                     std::size_t slot, std::size_t slots,
                                     double gamma, double b_max) {
  if (slot >= slots || slots > monotone_icc.size()) throw InvalidInput("slot out of range");
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be positive");
  IntervalObservation obs;
  obs.lower = slot + 1 == slots ? 0.0 : monotone_icc[slot] / gamma;
  obs.upper = slot == 0 ? 2.0 * b_max : monotone_icc[slot - 1] / gamma;
  obs.lower = std::max(obs.lower, 0.0);
  // Tied ICCs pin the value; keep a sliver so the interval stays half-open.
  if (obs.upper <= obs.lower) obs.upper = obs.lower + 1e-9 * std::max(1.0, obs.lower);
  return obs;
}

double TurnbullResult::cdf(double x) const {
  double F = 0.0;
  for (std::size_t j = 0; j < mass.size(); ++j) {
    F += mass[j] * std::clamp((x - lo[j]) / (hi[j] - lo[j]), 0.0, 1.0);
  }
  return std::min(F, 1.0);
}

double TurnbullResult::quantile(double u) const {
  if (mass.empty()) throw InvalidInput("empty Turnbull estimate");
  double cum = 0.0;
  for (std::size_t j = 0; j < mass.size(); ++j) {
    if (mass[j] <= 0.0) continue;
    if (u <= cum + mass[j] || j + 1 == mass.size()) {
      const double frac = std::clamp((u - cum) / mass[j], 0.0, 1.0);
      return lo[j] + frac * (hi[j] - lo[j]);
    }
    cum += mass[j];
  }
  for (std::size_t j = mass.size(); j-- > 0;) {
    if (mass[j] > 0.0) return hi[j];
  }
  return hi.back();
}

TurnbullResult turnbull_em(std::span<const IntervalObservation> obs, double tol,
                           std::size_t max_iter) {
  if (obs.empty()) throw InvalidInput("Turnbull estimator needs observations");
  struct End {
    double x;
    bool right;
  };
  std::vector<End> ends;
  double total_w = 0.0;
  for (const auto& o : obs) {
    if (!(o.lower < o.upper)) throw InvalidInput("interval needs lower < upper");
    if (!(o.weight > 0.0)) throw InvalidInput("interval weight must be positive");
    ends.push_back({o.lower, false});
    ends.push_back({o.upper, true});
    total_w += o.weight;
  }
  // Half-open intervals: at equal positions a right end comes first.
  std::sort(ends.begin(), ends.end(), [](const End& a, const End& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.right && !b.right;
  });
  TurnbullResult res;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    if (!ends[k].right && ends[k + 1].right) {
      res.lo.push_back(ends[k].x);
      res.hi.push_back(ends[k + 1].x);
    }
  }
  const std::size_t m = res.lo.size();
  // Each observation covers a contiguous run of innermost intervals.
  std::vector<std::size_t> first(obs.size()), last(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    first[i] = static_cast<std::size_t>(
        std::lower_bound(res.lo.begin(), res.lo.end(), obs[i].lower) - res.lo.begin());
    last[i] = static_cast<std::size_t>(
        std::upper_bound(res.hi.begin(), res.hi.end(), obs[i].upper) - res.hi.begin());
  }
  res.mass.assign(m, 1.0 / static_cast<double>(m));
  std::vector<double> prefix(m + 1), diff(m + 1);
  auto fill_prefix = [&](const std::vector<double>& p) {
    prefix[0] = 0.0;
    for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = prefix[j] + p[j];
  };
  auto loglik = [&](const std::vector<double>& p) {
    fill_prefix(p);
    double ll = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double D = prefix[last[i]] - prefix[first[i]];
      if (D <= 0.0) return -HUGE_VAL;
      ll += obs[i].weight * std::log(D);
    }
    return ll;
  };
  // One self-consistency update.
  auto em_step = [&](const std::vector<double>& p) {
    fill_prefix(p);
    std::fill(diff.begin(), diff.end(), 0.0);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double D = prefix[last[i]] - prefix[first[i]];
      if (D <= 0.0) continue;
      diff[first[i]] += obs[i].weight / D;
      diff[last[i]] -= obs[i].weight / D;
    }
    std::vector<double> next(m);
    double run = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      run += diff[j];
      next[j] = p[j] * run / total_w;
    }
    const double norm = std::accumulate(next.begin(), next.end(), 0.0);
    for (auto& x : next) x /= norm;
    return next;
  };
  auto max_change = [](const std::vector<double>& a, const std::vector<double>& b) {
    double c = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) c = std::max(c, std::abs(a[j] - b[j]));
    return c;
  };

  // Plain EM converges slowly on flat likelihoods; each iteration tries a
  // squared extrapolation (SQUAREM) and keeps it only if the likelihood does
  // not drop below that of two plain steps.
  res.loglik.push_back(loglik(res.mass));
  for (res.iterations = 0; res.iterations < max_iter;) {
    const std::vector<double>& p0 = res.mass;
    std::vector<double> p1 = em_step(p0);
    ++res.iterations;
    if (max_change(p1, p0) < tol) {
      res.mass = std::move(p1);
      res.loglik.push_back(loglik(res.mass));
      res.converged = true;
      break;
    }
    std::vector<double> p2 = em_step(p1);
    double r2 = 0.0, v2 = 0.0;
    std::vector<double> jump(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double r = p1[j] - p0[j];
      const double v = p2[j] - 2.0 * p1[j] + p0[j];
      r2 += r * r;
      v2 += v * v;
    }
    std::vector<double> best = p2;
    double best_ll = loglik(p2);
    if (v2 > 0.0) {
      const double step = std::min(-1.0, -std::sqrt(r2 / v2));
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double r = p1[j] - p0[j];
        const double v = p2[j] - 2.0 * p1[j] + p0[j];
        jump[j] = std::max(0.0, p0[j] - 2.0 * step * r + step * step * v);
        total += jump[j];
      }
      if (total > 0.0) {
        for (auto& x : jump) x /= total;
        std::vector<double> cand = em_step(jump);
        const double ll = loglik(cand);
        if (ll >= best_ll) {
          best = std::move(cand);
          best_ll = ll;
        }
      }
    }
    res.mass = std::move(best);
    res.loglik.push_back(best_ll);
  }
  return res;
}

ValuationEstimate estimate_valuations(std::span<const AuctionLogRow> log,
                                      std::span<const double> alpha, std::size_t types) {
  if (log.empty()) throw InvalidInput("auction log is empty");
  double b_max = 0.0;
  for (const auto& r : log) {
    if (!(r.gamma > 0.0)) throw InvalidInput("auction log gamma must be positive");
    b_max = std::max(b_max, r.bid);
    types = std::max(types, r.type + 1);
  }
  std::map<std::string, std::vector<const AuctionLogRow*>> auctions;
  std::vector<std::string> order;
  for (const auto& r : log) {
    auto [it, fresh] = auctions.try_emplace(r.auction);
    if (fresh) order.push_back(r.auction);
    it->second.push_back(&r);
  }
  ValuationEstimate est;
  est.intervals.resize(types);
  for (const auto& id : order) {
    auto rows = auctions[id];
    std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
      return a->gamma * a->bid > b->gamma * b->bid;
    });
    const std::size_t slot_count = std::min(rows.front()->slot_count, alpha.size());
    const std::size_t winners = std::min(slot_count, rows.size());
    if (winners == 0) continue;
    std::vector<double> scores;
    for (const auto* r : rows) scores.push_back(r->gamma * r->bid);
    const IccSequence icc = monotonize_icc(scores, alpha.first(slot_count));
    if (icc.fallback) ++est.fallbacks;
    for (std::size_t s = 0; s < winners; ++s) {
      est.intervals[rows[s]->type].push_back(
          valuation_bounds(icc.icc, s, winners, rows[s]->gamma, b_max));
    }
  }
  for (std::size_t t = 0; t < types; ++t) {
    if (est.intervals[t].empty()) {
      est.per_type.emplace_back();
    } else {
      est.per_type.push_back(turnbull_em(est.intervals[t]));
    }
  }
  return est;
}

ValuationPrior prior_from_marginals(std::span<const TurnbullResult> marginals,
                                    std::size_t n, std::uint64_t seed) {
  for (std::size_t t = 0; t < marginals.size(); ++t) {
    if (marginals[t].mass.empty()) {
      throw InvalidInput("no valuation data for type " + std::to_string(t + 1));
    }
  }
  return ValuationPrior::sampled(
      [&](Rng& rng) {
        std::vector<double> v;
        for (const auto& m : marginals) v.push_back(m.quantile(uniform01(rng)));
        return v;
      },
      n, seed, "turnbull");
}

std::vector<CtrPanelRow> read_panel_csv(std::istream& in) {
  CsvTable table(in, {"advertiser", "slot", "day", "impressions", "clicks"});
  std::vector<CtrPanelRow> rows;
  for (std::size_t r = 0; r < table.size(); ++r) {
    rows.push_back({table.index(r, "advertiser"), table.index(r, "slot"),
                    static_cast<std::size_t>(table.number(r, "day")),
                    table.number(r, "impressions"), table.number(r, "clicks")});
  }
  return rows;
}

std::vector<CtrPanelRow> read_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_panel_csv(in);
}

std::vector<AuctionLogRow> read_auction_log_csv(std::istream& in) {
  CsvTable table(in, {"auction_id", "type", "slot_count", "advertiser", "gamma", "bid"});
  std::vector<AuctionLogRow> rows;
  for (std::size_t r = 0; r < table.size(); ++r) {
    rows.push_back({table.text(r, "auction_id"), table.index(r, "type"),
                    static_cast<std::size_t>(table.number(r, "slot_count")),
                    table.text(r, "advertiser"), table.number(r, "gamma"),
                    table.number(r, "bid")});
  }
  return rows;
}

std::vector<AuctionLogRow> read_auction_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_auction_log_csv(in);
}

nlohmann::json slot_effects_to_json(const SlotEffectEstimate& est) {
  return {{"slot_effects", est.alpha},
          {"advertiser_quality", est.gamma},
          {"r2", est.r2},
          {"rows_used", est.rows_used}};
}

nlohmann::json valuations_to_json(const ValuationEstimate& est) {
  nlohmann::json types = nlohmann::json::array();
  for (std::size_t t = 0; t < est.per_type.size(); ++t) {
    const auto& r = est.per_type[t];
    nlohmann::json iv = nlohmann::json::array();
    for (std::size_t j = 0; j < r.lo.size(); ++j) iv.push_back({r.lo[j], r.hi[j]});
    types.push_back({{"type", t + 1},
                     {"observations", est.intervals[t].size()},
                     {"intervals", std::move(iv)},
                     {"mass", r.mass},
                     {"iterations", r.iterations},
                     {"converged", r.converged}});
  }
  return {{"types", std::move(types)}, {"icc_fallbacks", est.fallbacks}};
}

}  // namespace ibpa
