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
#include <memory>
#include <optional>
#include <vector>

#include "unlearnspn/config.hpp"
#include "unlearnspn/dataset.hpp"
#include "unlearnspn/spn.hpp"

namespace unlearnspn {

// The operation chosen for a view together with everything the node records
// about the choice. Analyzer models are kept exactly as they are stored:
// the clustering for SD, the independence model for SV, both for an NF
// reached because neither split applies, none otherwise.
struct Decision {
  Op op = Op::kCreateLeaf;
  Tri independencies = Tri::kUnevaluated;
  Tri clusters = Tri::kUnevaluated;
  bool exist_uninformative = false;
  bool all_uninformative = false;
  std::vector<VarIndex> uninformative;  // ascending, SU only
  std::optional<ClusteringModel> clustering;
  std::optional<IndependenceModel> independence;

  bool operator==(const Decision&) const = default;
};

std::uint64_t RootSeed(std::uint64_t master_seed);

// Order: single variable, uninformative variables, row threshold, then the
// independence analysis and, only when it finds no split, the clustering.
Decision DecideOperation(const DataView& view, const LearnConfig& config,
                         std::uint64_t node_seed);

// Recursive learner on a view, rooted at `path`.
Node LearnSpnNode(const DataView& view, const LearnConfig& config,
                  std::uint64_t node_seed, const Path& path);

// Builds the node for an already made decision; children are learned
// recursively.
Node BuildNode(const DataView& view, const Decision& decision,
               const LearnConfig& config, std::uint64_t node_seed,
               const Path& path);

// The state a node built from `decision` over `view` records.
NodeState RecordState(const DataView& view, const Decision& decision,
                      std::uint64_t node_seed, const Path& path);

// Single-variable leaf. Leaves carry no decision flags.
Node CreateLeaf(const DataView& view, VarIndex var, const LearnConfig& config,
                std::uint64_t node_seed, const Path& path);

// Trains on every row of `dataset` except `removed` (ascending, unique).
// Throws Error(kEmpty) when nothing survives.
Spn LearnSpn(std::shared_ptr<const Dataset> dataset, const LearnConfig& config,
             std::vector<RowId> removed = {});

// The learner without any recorded state: no row sets, seeds, flags or
// analyzer models are kept, and clustering runs without a trajectory.
// Used only to measure the cost of recording state.
struct PlainNode {
  NodeKind kind = NodeKind::kLeaf;
  std::vector<VarIndex> scope;
  std::vector<PlainNode> children;
  std::vector<std::uint64_t> child_counts;
  std::optional<LeafStats> leaf;
};

PlainNode LearnPlain(const Dataset& dataset, const LearnConfig& config);

// Same tree shape, scopes, sum counts and leaf statistics.
Comparison SameStructure(const Node& node, const PlainNode& plain);

}  // namespace unlearnspn
