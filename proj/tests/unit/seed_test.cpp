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

#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"
#include "unlearnspn/learn.hpp"
#include "unlearnspn/random.hpp"
#include "unlearnspn/verify.hpp"

namespace unlearnspn {
namespace {

TEST(DeriveChildSeed, Deterministic) {
  EXPECT_EQ(DeriveChildSeed(42, 3), DeriveChildSeed(42, 3));
  static_assert(DeriveChildSeed(1, 2) == DeriveChildSeed(1, 2));
}

TEST(DeriveChildSeed, SiblingsNeverCollideOnAMillionParents) {
  std::mt19937_64 gen(2026);
  std::size_t collisions = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const std::uint64_t s = gen();
    collisions += DeriveChildSeed(s, 0) == DeriveChildSeed(s, 1);
  }
  EXPECT_EQ(collisions, 0u);
}

std::map<std::string, std::uint64_t> SeedsByPath(const Node& root) {
  std::map<std::string, std::uint64_t> out;
  VisitNodes(root, [&](const Node& n) { out[FormatPath(n.state.path)] = n.state.seed; });
  return out;
}

TEST(NodeSeeds, DependOnlyOnThePath) {
  LearnConfig config;
  config.master_seed = 77;
  config.min_instances = 5;
  const auto a = Generate({Generator::kBlobs, 80, 3, 1, config});
  const auto b = Generate({Generator::kIndependentBlocks, 60, 4, 2, config});
  const auto seeds_a = SeedsByPath(LearnSpn(a, config).root);
  const auto seeds_b = SeedsByPath(LearnSpn(b, config).root);
  std::size_t shared = 0;
  for (const auto& [path, seed] : seeds_a) {
    const auto it = seeds_b.find(path);
    if (it == seeds_b.end()) continue;
    EXPECT_EQ(it->second, seed) << path;
    ++shared;
  }
  EXPECT_GE(shared, 2u);
  EXPECT_EQ(seeds_a.at("/"), RootSeed(77));
  if (seeds_a.count("/1")) {
    EXPECT_EQ(seeds_a.at("/1"), DeriveChildSeed(RootSeed(77), 1));
  }
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(1);
  for (std::uint64_t bound : {1ull, 2ull, 7ull, 1000ull}) {
    for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.Below(bound), bound);
  }
}

}  // namespace
}  // namespace unlearnspn
