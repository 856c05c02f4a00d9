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

#include "unlearnspn/learn.hpp"

#include <algorithm>
#include <utility>

#include "unlearnspn/error.hpp"
#include "unlearnspn/random.hpp"

namespace unlearnspn {
namespace {

Path ChildPath(const Path& path, std::size_t index) {
  Path out = path;
  out.push_back(static_cast<std::uint32_t>(index));
  return out;
}

std::vector<RowId> RowsOfCluster(const ClusteringModel& model, std::uint32_t cluster) {
  std::vector<RowId> rows;
  rows.reserve(model.cluster_counts[cluster]);
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    if (model.assignment[i] == cluster) rows.push_back(model.rows[i]);
  }
  return rows;
}

std::vector<VarIndex> Without(const std::vector<VarIndex>& scope,
                              const std::vector<VarIndex>& drop) {
  std::vector<VarIndex> out;
  std::set_difference(scope.begin(), scope.end(), drop.begin(), drop.end(),
                      std::back_inserter(out));
  return out;
}

PlainNode PlainLeaf(const DataView& view, VarIndex var, const LearnConfig& config) {
  PlainNode leaf;
  leaf.kind = NodeKind::kLeaf;
  leaf.scope = {var};
  leaf.leaf = ComputeLeafStats(view, var, config.categorical_alpha);
  return leaf;
}

PlainNode Plain(const DataView& view, const LearnConfig& config,
                std::uint64_t node_seed) {
  const Decision decision = DecideOperation(view, config, node_seed);
  PlainNode node;
  node.scope = view.scope();
  switch (decision.op) {
    case Op::kCreateLeaf:
      return PlainLeaf(view, view.scope().front(), config);
    case Op::kNaiveFactorization:
      node.kind = NodeKind::kProduct;
      for (VarIndex v : view.scope()) node.children.push_back(PlainLeaf(view, v, config));
      break;
    case Op::kSplitUninformative: {
      node.kind = NodeKind::kProduct;
      for (VarIndex v : decision.uninformative) {
        node.children.push_back(PlainLeaf(view, v, config));
      }
      const std::size_t index = node.children.size();
      node.children.push_back(
          Plain(view.WithScope(Without(view.scope(), decision.uninformative)), config,
                DeriveChildSeed(node_seed, index)));
      break;
    }
    case Op::kSplitData: {
      node.kind = NodeKind::kSum;
      const ClusteringModel& model = *decision.clustering;
      std::size_t index = 0;
      for (std::uint32_t c : model.NonEmptyClusters()) {
        node.child_counts.push_back(model.cluster_counts[c]);
        node.children.push_back(Plain(view.WithRows(RowsOfCluster(model, c)), config,
                                      DeriveChildSeed(node_seed, index++)));
      }
      break;
    }
    case Op::kSplitVariables: {
      node.kind = NodeKind::kProduct;
      std::size_t index = 0;
      for (const auto& component : decision.independence->components) {
        node.children.push_back(Plain(view.WithScope(component), config,
                                      DeriveChildSeed(node_seed, index++)));
      }
      break;
    }
  }
  return node;
}

Comparison Mismatch(const Node& node, std::string detail) {
  return {false, FormatPath(node.state.path), std::move(detail)};
}

}  // namespace

void LearnConfig::Validate() const {
  if (min_instances < 1) throw Error(ErrorCode::kUsage, "threshold must be at least 1");
  if (clustering.k < 2) throw Error(ErrorCode::kUsage, "k must be at least 2");
  if (!(clustering.quantum > 0.0)) {
    throw Error(ErrorCode::kUsage, "quantization step must be positive");
  }
  if (clustering.max_iterations < 1) {
    throw Error(ErrorCode::kUsage, "iteration cap must be at least 1");
  }
  if (independence.num_features < 1) {
    throw Error(ErrorCode::kUsage, "feature count must be at least 1");
  }
  if (!(independence.scale > 0.0)) {
    throw Error(ErrorCode::kUsage, "projection scale must be positive");
  }
  if (!(independence.threshold >= 0.0 && independence.threshold <= 1.0)) {
    throw Error(ErrorCode::kUsage, "dependency threshold must lie in [0, 1]");
  }
  if (!(independence.ridge >= 0.0)) throw Error(ErrorCode::kUsage, "ridge must be >= 0");
  if (!(categorical_alpha >= 0.0)) {
    throw Error(ErrorCode::kUsage, "categorical smoothing must be >= 0");
  }
}

NodeState RecordState(const DataView& view, const Decision& decision,
                      std::uint64_t node_seed, const Path& path) {
  NodeState st;
  st.scope = view.scope();
  st.op = decision.op;
  st.data = view.rows();
  st.num_data = view.size();
  st.independencies = decision.independencies;
  st.clusters = decision.clusters;
  st.exist_uninformative = decision.exist_uninformative;
  st.all_uninformative = decision.all_uninformative;
  st.seed = node_seed;
  st.path = path;
  switch (decision.op) {
    case Op::kSplitData:
      st.clustering = decision.clustering;
      break;
    case Op::kSplitVariables:
      st.variable_split = decision.independence;
      break;
    case Op::kNaiveFactorization:
      if (decision.clustering && decision.independence) {
        st.decision_analyses =
            DecisionAnalyses{*decision.clustering, *decision.independence};
      }
      break;
    default:
      break;
  }
  return st;
}

std::uint64_t RootSeed(std::uint64_t master_seed) {
  return DeriveChildSeed(master_seed, 0);
}

Decision DecideOperation(const DataView& view, const LearnConfig& config,
                         std::uint64_t node_seed) {
  if (view.empty()) throw Error(ErrorCode::kEmpty, "cannot decide on an empty view");
  Decision decision;
  if (view.scope().size() == 1) {
    decision.op = Op::kCreateLeaf;
    return decision;
  }
  for (VarIndex v : view.scope()) {
    if (IsUninformative(view, v)) decision.uninformative.push_back(v);
  }
  if (!decision.uninformative.empty()) {
    decision.exist_uninformative = true;
    if (decision.uninformative.size() == view.scope().size()) {
      decision.all_uninformative = true;
      decision.uninformative.clear();
      decision.op = Op::kNaiveFactorization;
    } else {
      decision.op = Op::kSplitUninformative;
    }
    return decision;
  }
  if (view.size() <= config.min_instances) {
    decision.op = Op::kNaiveFactorization;
    return decision;
  }
  IndependenceModel independence = FitIndependence(view, node_seed, config.independence);
  if (independence.independencies_exist()) {
    decision.op = Op::kSplitVariables;
    decision.independencies = Tri::kTrue;
    decision.independence = std::move(independence);
    return decision;
  }
  decision.independencies = Tri::kFalse;
  ClusteringModel clustering = FitClusters(view, node_seed, config.clustering);
  if (clustering.clusters_exist()) {
    decision.op = Op::kSplitData;
    decision.clusters = Tri::kTrue;
    decision.clustering = std::move(clustering);
    return decision;
  }
  decision.op = Op::kNaiveFactorization;
  decision.clusters = Tri::kFalse;
  decision.clustering = std::move(clustering);
  decision.independence = std::move(independence);
  return decision;
}

Node CreateLeaf(const DataView& view, VarIndex var, const LearnConfig& config,
                std::uint64_t node_seed, const Path& path) {
  Node leaf;
  leaf.kind = NodeKind::kLeaf;
  leaf.state.scope = {var};
  leaf.state.op = Op::kCreateLeaf;
  leaf.state.data = view.rows();
  leaf.state.num_data = view.size();
  leaf.state.seed = node_seed;
  leaf.state.path = path;
  leaf.leaf = ComputeLeafStats(view, var, config.categorical_alpha);
  return leaf;
}

Node BuildNode(const DataView& view, const Decision& decision,
               const LearnConfig& config, std::uint64_t node_seed,
               const Path& path) {
  if (decision.op == Op::kCreateLeaf) {
    return CreateLeaf(view, view.scope().front(), config, node_seed, path);
  }
  Node node;
  node.state = RecordState(view, decision, node_seed, path);
  auto child_seed = [&](std::size_t i) { return DeriveChildSeed(node_seed, i); };
  switch (decision.op) {
    case Op::kCreateLeaf:
      break;
    case Op::kNaiveFactorization:
      node.kind = NodeKind::kProduct;
      for (std::size_t i = 0; i < view.scope().size(); ++i) {
        node.children.push_back(
            CreateLeaf(view, view.scope()[i], config, child_seed(i), ChildPath(path, i)));
      }
      break;
    case Op::kSplitUninformative: {
      node.kind = NodeKind::kProduct;
      const auto& constant = decision.uninformative;
      for (std::size_t i = 0; i < constant.size(); ++i) {
        node.children.push_back(
            CreateLeaf(view, constant[i], config, child_seed(i), ChildPath(path, i)));
      }
      const std::size_t last = constant.size();
      node.children.push_back(LearnSpnNode(view.WithScope(Without(view.scope(), constant)),
                                           config, child_seed(last),
                                           ChildPath(path, last)));
      break;
    }
    case Op::kSplitData: {
      node.kind = NodeKind::kSum;
      const ClusteringModel& model = *decision.clustering;
      std::size_t i = 0;
      for (std::uint32_t c : model.NonEmptyClusters()) {
        node.child_counts.push_back(model.cluster_counts[c]);
        node.children.push_back(LearnSpnNode(view.WithRows(RowsOfCluster(model, c)),
                                             config, child_seed(i), ChildPath(path, i)));
        ++i;
      }
      break;
    }
    case Op::kSplitVariables: {
      node.kind = NodeKind::kProduct;
      const auto& components = decision.independence->components;
      for (std::size_t i = 0; i < components.size(); ++i) {
        node.children.push_back(LearnSpnNode(view.WithScope(components[i]), config,
                                             child_seed(i), ChildPath(path, i)));
      }
      break;
    }
  }
  return node;
}

Node LearnSpnNode(const DataView& view, const LearnConfig& config,
                  std::uint64_t node_seed, const Path& path) {
  return BuildNode(view, DecideOperation(view, config, node_seed), config, node_seed,
                   path);
}

Spn LearnSpn(std::shared_ptr<const Dataset> dataset, const LearnConfig& config,
             std::vector<RowId> removed) {
  if (!dataset) throw Error(ErrorCode::kUsage, "no dataset");
  config.Validate();
  for (std::size_t i = 0; i < removed.size(); ++i) {
    if (removed[i] >= dataset->num_rows()) {
      throw Error(ErrorCode::kRowAbsent,
                  "row " + std::to_string(removed[i]) + " does not exist");
    }
    if (i > 0 && removed[i] <= removed[i - 1]) {
      throw Error(ErrorCode::kUsage, "removed rows must be ascending and unique");
    }
  }
  Spn spn;
  spn.dataset = std::move(dataset);
  spn.removed = std::move(removed);
  spn.config = config;
  std::vector<RowId> rows = spn.LiveRows();
  if (rows.empty()) throw Error(ErrorCode::kEmpty, "no rows left to train on");
  std::vector<VarIndex> scope(spn.dataset->num_vars());
  for (VarIndex v = 0; v < scope.size(); ++v) scope[v] = v;
  const DataView view(*spn.dataset, std::move(rows), std::move(scope));
  spn.root = LearnSpnNode(view, config, RootSeed(config.master_seed), {});
  return spn;
}

PlainNode LearnPlain(const Dataset& dataset, const LearnConfig& config) {
  config.Validate();
  if (dataset.num_rows() == 0) throw Error(ErrorCode::kEmpty, "no rows to train on");
  LearnConfig plain = config;
  plain.clustering.record_trajectory = false;
  return Plain(DataView::Full(dataset), plain, RootSeed(config.master_seed));
}

Comparison SameStructure(const Node& node, const PlainNode& plain) {
  if (node.kind != plain.kind) return Mismatch(node, "node kind");
  if (node.state.scope != plain.scope) return Mismatch(node, "scope");
  if (node.child_counts != plain.child_counts) return Mismatch(node, "child counts");
  if (node.leaf != plain.leaf) return Mismatch(node, "leaf statistics");
  if (node.children.size() != plain.children.size()) {
    return Mismatch(node, "number of children");
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (Comparison c = SameStructure(node.children[i], plain.children[i]); !c) return c;
  }
  return {};
}

}  // namespace unlearnspn
