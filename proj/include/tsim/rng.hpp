// Copyright 2026 The teleportsim developers
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

#include <cmath>
#include <cstdint>
#include <random>

namespace tsim {

using RandomEngine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for the independent stream of one trial. Constant-time derivation
/// keeps parallel trial scheduling free of any shared generator state.
inline std::uint64_t stream_seed(std::uint64_t master_seed,
                                 std::uint64_t stream_index) {
  return splitmix64(splitmix64(master_seed) ^
                    (stream_index * 0x9E3779B97F4A7C15ULL + 1));
}

inline RandomEngine stream_engine(std::uint64_t master_seed,
                                  std::uint64_t stream_index) {
  return RandomEngine(stream_seed(master_seed, stream_index));
}

/// Canonical 53-bit uniform draw in [0, 1). mt19937_64 output is pinned by
/// the standard, so sequences are reproducible across platforms.
inline double uniform01(RandomEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on uniform01, avoiding the
/// implementation-defined std::normal_distribution.
inline double normal01(RandomEngine& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925287 * u2);
}

}  // namespace tsim
