// Copyright 2026 The FunGrasp Lab Authors
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

#ifndef FUNGRASP_RNG_H_
#define FUNGRASP_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace fungrasp {

// std::mt19937_64 output is fully specified by the standard; the standard
// distributions are not, so the helpers below are used everywhere instead.
using Rng = std::mt19937_64;

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent stream from a root seed and a path of indices,
// e.g. (seed, iteration, episode). Results do not depend on how work is
// scheduled across threads.
inline Rng SplitRng(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = SplitMix64(seed);
  for (std::uint64_t p : path) h = SplitMix64(h ^ SplitMix64(p + 0x632be59bd9b4e019ull));
  return Rng(h);
}

// Uniform in [0, 1) with 53 random bits.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformRange(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

// Standard normal via Box-Muller; consumes two draws per call.
inline double StandardNormal(Rng& rng) {
  double u1 = Uniform01(rng);
  const double u2 = Uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline int UniformIndex(Rng& rng, int n) {
  return static_cast<int>(Uniform01(rng) * n);
}

}  // namespace fungrasp

#endif  // FUNGRASP_RNG_H_
