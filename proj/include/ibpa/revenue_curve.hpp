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
#include <span>
#include <vector>

#include <json.hpp>

#include "ibpa/core_model.hpp"
#include "ibpa/menu.hpp"
#include "ibpa/solver.hpp"

namespace ibpa {

struct CurveConfig {
  std::size_t grid_size = 50;
  MenuClass menu_class = MenuClass::kFull;
  SolverConfig solver;
  // Seed binary solves with additive ones and full solves with binary ones.
  bool hierarchical = true;
};

// Maximal piece of the envelope with constant slope.
struct CurveSegment {
  double q_lo = 0.0;
  double q_hi = 0.0;
  double slope = 0.0;
  std::size_t vertex_lo = 0;  // indices into vertices()
  std::size_t vertex_hi = 0;
};

struct CurveVertex {
  double q = 0.0;
  double value = 0.0;
  std::size_t menu = 0;  // index into menus()
};

// Lottery between two vertex menus: vertex lo with probability weight_lo.
struct MenuBracket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double weight_lo = 1.0;
};

// Normalized revenue curve on a grid plus its least concave majorant.
class RevenueCurve {
 public:
  RevenueCurve(std::vector<double> grid, std::vector<double> raw_values,
               std::vector<Menu> menus, std::size_t solver_warnings = 0);

  std::span<const double> grid() const { return grid_; }
  std::span<const double> raw_values() const { return raw_; }
  std::span<const double> values() const { return envelope_; }  // at grid points
  const std::vector<Menu>& menus() const { return menus_; }
  std::span<const CurveVertex> vertices() const { return vertices_; }
  std::span<const CurveSegment> segments() const { return segments_; }
  std::size_t solver_warnings() const { return warnings_; }
  bool concavified() const { return true; }

  double value(double q) const;
  // Right derivative of the envelope; the last slope at q = 1.
  double marginal(double q) const;
  // Left end of the trailing flat piece (1 when the curve never flattens).
  double saturation() const { return saturation_; }
  std::size_t segment_at(double q) const;
  MenuBracket bracket(double q) const;
  const Menu& vertex_menu(std::size_t v) const { return menus_[vertices_[v].menu]; }

 private:
  std::vector<double> grid_;
  std::vector<double> raw_;
  std::vector<Menu> menus_;
  std::vector<double> envelope_;
  std::vector<CurveVertex> vertices_;
  std::vector<CurveSegment> segments_;
  double saturation_ = 1.0;
  std::size_t warnings_ = 0;
};

RevenueCurve build_curve(const ValuationPrior& prior, const InventoryDistribution& p,
                         std::span<const double> beta, const CurveConfig& cfg);

// Least concave majorant of the running maximum of values on grid.
std::vector<double> concave_envelope(std::span<const double> grid,
                                     std::span<const double> values);

// R_as(q) = alpha_s gamma_a Phi_a(q) at the grid points.
std::vector<double> scale_to_slot(const RevenueCurve& curve, double alpha_s,
                                  double gamma_a);

nlohmann::json curve_to_json(const RevenueCurve& curve, std::size_t advertiser);
RevenueCurve curve_from_json(const nlohmann::json& doc,
                             std::span<const double> inventory);

}  // namespace ibpa
