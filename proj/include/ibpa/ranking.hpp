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

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace ibpa {

// Position in the marginal-revenue ranking: higher gamma * Phi'(q) first,
// then lower quantile, then lower advertiser index.
struct RankKey {
  double mr = 0.0;
  double q = 1.0;
  std::size_t index = 0;
};

inline bool mr_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

inline bool ranks_above(const RankKey& a, const RankKey& b) {
  if (!mr_equal(a.mr, b.mr)) return a.mr > b.mr;
  if (a.q != b.q) return a.q < b.q;
  return a.index < b.index;
}

}  // namespace ibpa
