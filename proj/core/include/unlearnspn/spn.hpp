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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unlearnspn/clustering.hpp"
#include "unlearnspn/config.hpp"
#include "unlearnspn/dataset.hpp"
#include "unlearnspn/independence.hpp"
#include "unlearnspn/leaves.hpp"

namespace unlearnspn {

// The five structure-learning operations.
enum class Op : std::uint8_t {
  kCreateLeaf = 0,           // CL
  kNaiveFactorization = 1,   // NF
  kSplitUninformative = 2,   // SU
  kSplitData = 3,            // SD
  kSplitVariables = 4,       // SV
};
inline constexpr int kNumOps = 5;

std::string_view OpName(Op op);  // "CL", "NF", ...
std::optional<Op> ParseOp(std::string_view name);

// A predicate that the learner may not have evaluated at a node.
enum class Tri : std::uint8_t { kUnevaluated = 0, kFalse = 1, kTrue = 2 };

inline Tri ToTri(bool b) { return b ? Tri::kTrue : Tri::kFalse; }

using Path = std::vector<std::uint32_t>;

std::string FormatPath(const Path& path);  // "/" for the root, "/0/2" below

// Analyzers fitted by a naive factorization that was chosen because neither
// clusters nor independencies were found.
struct DecisionAnalyses {
  ClusteringModel clustering;
  IndependenceModel independence;

  bool operator==(const DecisionAnalyses&) const = default;
};

// Everything recorded about how a node was built. Row ids index the
// embedded dataset; values are never copied.
struct NodeState {
  std::vector<VarIndex> scope;  // ascending
  Op op = Op::kCreateLeaf;
  std::vector<RowId> data;      // ascending
  std::uint64_t num_data = 0;
  Tri independencies = Tri::kUnevaluated;
  Tri clusters = Tri::kUnevaluated;
  bool exist_uninformative = false;
  bool all_uninformative = false;
  std::uint64_t seed = 0;
  Path path;
  std::optional<ClusteringModel> clustering;        // iff op == SD
  std::optional<IndependenceModel> variable_split;  // iff op == SV
  std::optional<DecisionAnalyses> decision_analyses;

  bool operator==(const NodeState&) const = default;
};

enum class NodeKind : std::uint8_t { kSum = 0, kProduct = 1, kLeaf = 2 };

struct Node {
  NodeKind kind = NodeKind::kLeaf;
  NodeState state;
  std::vector<Node> children;
  // Sum nodes: rows per child. Weights are child_counts[i] / num_data and
  // are never stored as floating point.
  std::vector<std::uint64_t> child_counts;
  std::optional<LeafStats> leaf;

  VarIndex leaf_variable() const { return state.scope.front(); }
  double weight(std::size_t child) const;

  bool operator==(const Node&) const = default;
};

// A trained, unlearnable model: tree, configuration and its training data.
struct Spn {
  std::shared_ptr<const Dataset> dataset;
  std::vector<RowId> removed;  // tombstoned row ids, ascending
  LearnConfig config;
  Node root;

  std::vector<RowId> LiveRows() const;
  bool IsRemoved(RowId row) const;
};

struct Violation {
  std::string path;
  std::string message;
};

// Completeness, decomposability, count-exact weights and state coherence at
// every node. Empty iff valid.
std::vector<Violation> Validate(const Spn& spn);
std::vector<Violation> ValidateNode(const Node& root, const Dataset& dataset);

// Natural-log density of a full assignment (categoricals as codes).
double LogLikelihood(const Spn& spn, const std::vector<double>& assignment);
double LogLikelihood(const Node& node, const std::vector<double>& assignment);

struct Comparison {
  bool equal = true;
  std::string path;    // first differing node
  std::string detail;  // what differs there

  explicit operator bool() const { return equal; }
};

// Recursive comparison of kind, scope, op, row sets, flags, seeds, child
// order and counts, categorical counts (exact), analyzer partitions, and
// gaussian mean/variance within `tolerance` relative to max(1, |a|, |b|).
Comparison StructuralEqual(const Node& a, const Node& b, double tolerance);
Comparison StructuralEqual(const Spn& a, const Spn& b, double tolerance);

// Pre-order traversal.
void VisitNodes(const Node& root, const std::function<void(const Node&)>& fn);

struct TreeStats {
  std::size_t nodes = 0;
  std::size_t sum_nodes = 0;
  std::size_t product_nodes = 0;
  std::size_t leaves = 0;
  std::size_t depth = 0;
  std::array<std::size_t, kNumOps> ops{};
};
TreeStats ComputeTreeStats(const Node& root);

}  // namespace unlearnspn
