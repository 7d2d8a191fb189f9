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

#include <span>
#include <vector>

namespace ibpa {

// Weighted least-squares projection onto non-increasing sequences
// (pool-adjacent-violators).
std::vector<double> isotonic_nonincreasing(std::span<const double> y,
                                           std::span<const double> w = {});
std::vector<double> isotonic_nondecreasing(std::span<const double> y,
                                           std::span<const double> w = {});

}  // namespace ibpa
