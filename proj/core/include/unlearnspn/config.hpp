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

#include <cstdint>

#include "unlearnspn/clustering.hpp"
#include "unlearnspn/independence.hpp"
#include "unlearnspn/leaves.hpp"

namespace unlearnspn {

struct LearnConfig {
  std::uint64_t master_seed = 0;
  // Nodes with at most this many rows are naively factorized.
  std::uint32_t min_instances = 50;
  ClusteringConfig clustering;
  IndependenceConfig independence;
  double categorical_alpha = 0.0;
  RemovalMode removal_mode = RemovalMode::kIncremental;

  // Throws Error(kUsage) unless min_instances >= 1 and k >= 2.
  void Validate() const;

  bool operator==(const LearnConfig&) const = default;
};

}  // namespace unlearnspn
