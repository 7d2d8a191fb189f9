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

#include "ibpa/isotonic.hpp"

#include <stdexcept>

namespace ibpa {

std::vector<double> isotonic_nonincreasing(std::span<const double> y,
                                           std::span<const double> w) {
  if (!w.empty() && w.size() != y.size()) {
    throw std::invalid_argument("isotonic: weights and values differ in length");
  }
  struct Block {
    double mean, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    Block b{y[i], w.empty() ? 1.0 : w[i], 1};
    while (!blocks.empty() && blocks.back().mean < b.mean) {
      const Block& a = blocks.back();
      const double total = a.weight + b.weight;
      b.mean = total > 0.0 ? (a.mean * a.weight + b.mean * b.weight) / total
                           : 0.5 * (a.mean + b.mean);
      b.weight = total;
      b.count += a.count;
      blocks.pop_back();
    }
    blocks.push_back(b);
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

std::vector<double> isotonic_nondecreasing(std::span<const double> y,
                                           std::span<const double> w) {
  std::vector<double> neg(y.begin(), y.end());
  for (auto& v : neg) v = -v;
  auto out = isotonic_nonincreasing(neg, w);
  for (auto& v : out) v = -v;
  return out;
}

}  // namespace ibpa
