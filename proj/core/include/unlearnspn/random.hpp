// Copyright 2026 The unlearnspn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace unlearnspn {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t Mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of child `index` below a node seeded with `parent_seed`. Distinct
// indices under the same parent always give distinct seeds.
constexpr std::uint64_t DeriveChildSeed(std::uint64_t parent_seed,
                                        std::uint64_t index) noexcept {
  return Mix64(parent_seed ^ Mix64(index ^ 0xD1B54A32D192ED03ULL));
}

// Sub-streams of a node seed, far away from any child index.
inline constexpr std::uint64_t kClusteringStream = 0xC105'7E12'0000'0001ULL;
inline constexpr std::uint64_t kIndependenceStream = 0x12DC'0000'0000'0002ULL;

// Portable draws on top of mt19937_64 (whose output sequence is fixed by
// the standard, unlike the <random> distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  std::uint64_t Next() { return engine_(); }

  // Uniform integer in [0, bound).
  std::uint64_t Below(std::uint64_t bound) {
    // Lemire's multiply-shift without the rejection step is biased by at most
    // bound / 2^64, which is irrelevant for our sizes.
    __extension__ using Wide = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<Wide>(engine_()) * bound) >> 64);
  }

  // Standard normal via Box-Muller; one draw per call.
  double Normal() {
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace unlearnspn
