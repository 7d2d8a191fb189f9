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

#include <cstdint>
#include <random>

namespace ibpa {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent seed for (stream, index) from a master seed. Used to
// give every auction and every mechanism-internal draw its own substream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index = 0);

// Platform-stable uniform on [0,1) (53 random bits).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Platform-stable integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

namespace streams {
inline constexpr std::uint64_t kInstance = 1;
inline constexpr std::uint64_t kMechanism = 2;
inline constexpr std::uint64_t kSolver = 3;
inline constexpr std::uint64_t kInterim = 4;
inline constexpr std::uint64_t kPrior = 5;
}  // namespace streams

}  // namespace ibpa
