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

#include "unlearnspn/unlearn.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "unlearnspn/error.hpp"
#include "unlearnspn/random.hpp"

namespace unlearnspn {
namespace {

struct Context {
  const Dataset& dataset;
  const LearnConfig& config;
  const UnlearnOptions& options;
  RowId row;
  std::vector<ActionRecord>& log;
};

void Log(Context& ctx, const Path& path, UnlearnAction action, Op op_old, Op op_new) {
  ctx.log.push_back({FormatPath(path), action, op_old, op_new});
}

Path ChildPath(const Path& path, std::size_t index) {
  Path out = path;
  out.push_back(static_cast<std::uint32_t>(index));
  return out;
}

bool Holds(const NodeState& st, RowId row) {
  return std::binary_search(st.data.begin(), st.data.end(), row);
}

void Unlearn(Node& node, Context& ctx);

void UnlearnCreateLeaf(Node& leaf, const DataView& survivors, Context& ctx) {
  const VarIndex var = leaf.leaf_variable();
  if (ctx.config.removal_mode == RemovalMode::kExactReplay) {
    leaf.leaf = ComputeLeafStats(survivors.WithScope({var}), var,
                                 ctx.config.categorical_alpha);
  } else {
    RemoveValue(*leaf.leaf, ctx.dataset.value(ctx.row, var));
  }
  leaf.state.data = survivors.rows();
  leaf.state.num_data = survivors.size();
  Log(ctx, leaf.state.path, UnlearnAction::kLeafUpdated, Op::kCreateLeaf,
      Op::kCreateLeaf);
}

void Rebuild(Node& node, const DataView& survivors, const Revision& revision,
             Context& ctx) {
  const Op op_old = node.state.op;
  const Op op_new = revision.decision.op;
  const std::uint64_t seed = node.state.seed;
  const Path path = node.state.path;
  node = BuildNode(survivors, revision.decision, ctx.config, seed, path);
  Log(ctx, path,
      op_new == Op::kNaiveFactorization && op_old != op_new
          ? UnlearnAction::kNaiveFactorized
          : UnlearnAction::kRetrainedSubtree,
      op_old, op_new);
}

void UpdateState(NodeState& st, const DataView& survivors, const Decision& decision) {
  st = RecordState(survivors, decision, st.seed, st.path);
}

void UnlearnNaiveFactorization(Node& node, const DataView& survivors,
                               const Revision& revision, Context& ctx) {
  UpdateState(node.state, survivors, revision.decision);
  Log(ctx, node.state.path, UnlearnAction::kStateUpdated, Op::kNaiveFactorization,
      Op::kNaiveFactorization);
  for (Node& leaf : node.children) UnlearnCreateLeaf(leaf, survivors, ctx);
}

void UnlearnSplitUninformative(Node& node, const DataView& survivors,
                               const Revision& revision, Context& ctx) {
  const std::vector<VarIndex>& constant = revision.decision.uninformative;
  const std::size_t old_leaves = node.children.size() - 1;
  UpdateState(node.state, survivors, revision.decision);
  const NodeState& st = node.state;

  if (constant.size() == old_leaves) {
    Log(ctx, st.path, UnlearnAction::kStateUpdated, Op::kSplitUninformative,
        Op::kSplitUninformative);
    for (std::size_t i = 0; i < old_leaves; ++i) {
      UnlearnCreateLeaf(node.children[i], survivors, ctx);
    }
    Unlearn(node.children.back(), ctx);
    return;
  }

  // Further variables became constant: merge new leaves into variable order
  // and relearn what is still informative.
  Log(ctx, st.path, UnlearnAction::kNewLeavesAdded, Op::kSplitUninformative,
      Op::kSplitUninformative);
  std::vector<Node> old = std::move(node.children);
  node.children.clear();
  std::size_t next_old = 0;
  for (std::size_t i = 0; i < constant.size(); ++i) {
    const std::uint64_t seed = DeriveChildSeed(st.seed, i);
    if (next_old < old_leaves && old[next_old].leaf_variable() == constant[i]) {
      Node leaf = std::move(old[next_old++]);
      UnlearnCreateLeaf(leaf, survivors, ctx);
      leaf.state.seed = seed;
      leaf.state.path = ChildPath(st.path, i);
      node.children.push_back(std::move(leaf));
    } else {
      node.children.push_back(CreateLeaf(survivors, constant[i], ctx.config, seed,
                                         ChildPath(st.path, i)));
    }
  }
  std::vector<VarIndex> informative;
  std::set_difference(st.scope.begin(), st.scope.end(), constant.begin(), constant.end(),
                      std::back_inserter(informative));
  const std::size_t last = constant.size();
  node.children.push_back(LearnSpnNode(survivors.WithScope(std::move(informative)),
                                       ctx.config, DeriveChildSeed(st.seed, last),
                                       ChildPath(st.path, last)));
}

void UnlearnSplitData(Node& node, const DataView& survivors, const Revision& revision,
                      Context& ctx) {
  if (revision.clustering_changed) {
    Rebuild(node, survivors, revision, ctx);
    return;
  }
  const ClusteringModel& before = *node.state.clustering;
  const std::uint32_t cluster = *before.ClusterOf(ctx.row);
  const std::vector<std::uint32_t> nonempty = before.NonEmptyClusters();
  const auto child = static_cast<std::size_t>(
      std::find(nonempty.begin(), nonempty.end(), cluster) - nonempty.begin());

  UpdateState(node.state, survivors, revision.decision);
  if (!ctx.options.skip_weight_update) --node.child_counts[child];
  Log(ctx, node.state.path, UnlearnAction::kWeightsUpdated, Op::kSplitData,
      Op::kSplitData);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (i == child) {
      Unlearn(node.children[i], ctx);
    } else {
      Log(ctx, node.children[i].state.path, UnlearnAction::kSkipped,
          node.children[i].state.op, node.children[i].state.op);
    }
  }
}

void UnlearnSplitVariables(Node& node, const DataView& survivors,
                           const Revision& revision, Context& ctx) {
  if (revision.independence_changed) {
    Rebuild(node, survivors, revision, ctx);
    return;
  }
  UpdateState(node.state, survivors, revision.decision);
  Log(ctx, node.state.path, UnlearnAction::kStateUpdated, Op::kSplitVariables,
      Op::kSplitVariables);
  for (Node& child : node.children) Unlearn(child, ctx);
}

void Unlearn(Node& node, Context& ctx) {
  if (!Holds(node.state, ctx.row)) {
    Log(ctx, node.state.path, UnlearnAction::kSkipped, node.state.op, node.state.op);
    return;
  }
  const DataView survivors =
      DataView(ctx.dataset, node.state.data, node.state.scope).WithoutRow(ctx.row);
  if (node.kind == NodeKind::kLeaf) {
    UnlearnCreateLeaf(node, survivors, ctx);
    return;
  }
  const Revision revision = Revise(node.state, ctx.row, survivors, ctx.config);
  if (revision.decision.op != node.state.op) {
    Rebuild(node, survivors, revision, ctx);
    return;
  }
  switch (node.state.op) {
    case Op::kNaiveFactorization:
      UnlearnNaiveFactorization(node, survivors, revision, ctx);
      break;
    case Op::kSplitUninformative:
      UnlearnSplitUninformative(node, survivors, revision, ctx);
      break;
    case Op::kSplitData:
      UnlearnSplitData(node, survivors, revision, ctx);
      break;
    case Op::kSplitVariables:
      UnlearnSplitVariables(node, survivors, revision, ctx);
      break;
    case Op::kCreateLeaf:
      break;
  }
}

void CheckRemovable(const Spn& spn, RowId row) {
  if (row >= spn.dataset->num_rows()) {
    throw Error(ErrorCode::kRowAbsent,
                "row " + std::to_string(row) + " does not exist in the dataset");
  }
  if (spn.IsRemoved(row)) {
    throw Error(ErrorCode::kRowAbsent,
                "row " + std::to_string(row) + " was already removed");
  }
}

}  // namespace

Revision Revise(const NodeState& st, RowId row, const DataView& survivors,
                const LearnConfig& config) {
  Revision revision;
  Decision& d = revision.decision;
  if (st.scope.size() == 1) {
    d.op = Op::kCreateLeaf;
    return revision;
  }
  if (survivors.empty()) throw Error(ErrorCode::kExhausted, "dataset exhausted");

  // A constant column stays constant on fewer rows, so only columns that
  // varied before need checking.
  if (st.all_uninformative) {
    d.op = Op::kNaiveFactorization;
    d.exist_uninformative = true;
    d.all_uninformative = true;
    return revision;
  }
  for (VarIndex v : st.scope) {
    if (IsUninformative(survivors, v)) d.uninformative.push_back(v);
  }
  if (!d.uninformative.empty()) {
    d.exist_uninformative = true;
    if (d.uninformative.size() == st.scope.size()) {
      d.all_uninformative = true;
      d.uninformative.clear();
      d.op = Op::kNaiveFactorization;
    } else {
      d.op = Op::kSplitUninformative;
    }
    return revision;
  }
  if (survivors.size() <= config.min_instances) {
    d.op = Op::kNaiveFactorization;
    return revision;
  }

  IndependenceModel independence;
  if (st.variable_split) {
    IndependenceRemoval removal = RemoveFromIndependence(*st.variable_split, survivors);
    revision.independence_changed = removal.changed;
    independence = std::move(removal.model);
  } else if (st.decision_analyses) {
    independence =
        RemoveFromIndependence(st.decision_analyses->independence, survivors).model;
  } else {
    independence = FitIndependence(survivors, st.seed, config.independence);
  }
  if (independence.independencies_exist()) {
    d.op = Op::kSplitVariables;
    d.independencies = Tri::kTrue;
    d.independence = std::move(independence);
    return revision;
  }
  d.independencies = Tri::kFalse;

  ClusteringModel clustering;
  if (st.clustering) {
    ClusterRemoval removal = RemoveFromClusters(*st.clustering, survivors.dataset(), row);
    revision.clustering_changed = removal.changed;
    clustering = std::move(removal.model);
  } else if (st.decision_analyses) {
    clustering =
        RemoveFromClusters(st.decision_analyses->clustering, survivors.dataset(), row)
            .model;
  } else {
    clustering = FitClusters(survivors, st.seed, config.clustering);
  }
  if (clustering.clusters_exist()) {
    d.op = Op::kSplitData;
    d.clusters = Tri::kTrue;
    d.clustering = std::move(clustering);
    return revision;
  }
  d.op = Op::kNaiveFactorization;
  d.clusters = Tri::kFalse;
  d.clustering = std::move(clustering);
  d.independence = std::move(independence);
  return revision;
}

std::string_view ActionName(UnlearnAction action) {
  static constexpr std::array<std::string_view, 7> kNames = {
      "skipped",           "state-updated",   "leaf-updated",    "weights-updated",
      "retrained-subtree", "naive-factorized", "new-leaves-added"};
  return kNames[static_cast<std::size_t>(action)];
}

RemovalOutcome UnlearnSpn(Spn& spn, RowId row, const UnlearnOptions& options) {
  CheckRemovable(spn, row);
  if (spn.root.state.num_data <= 1) {
    throw Error(ErrorCode::kExhausted,
                "dataset exhausted: row " + std::to_string(row) + " is the last one");
  }
  RemovalOutcome outcome;
  outcome.rows.push_back(row);
  Context ctx{*spn.dataset, spn.config, options, row, outcome.actions};
  Unlearn(spn.root, ctx);
  spn.removed.insert(std::upper_bound(spn.removed.begin(), spn.removed.end(), row), row);
  return outcome;
}

RemovalOutcome UnlearnBatch(Spn& spn, std::vector<RowId> rows,
                            const UnlearnOptions& options) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  for (RowId row : rows) CheckRemovable(spn, row);
  if (!rows.empty() && rows.size() >= spn.root.state.num_data) {
    throw Error(ErrorCode::kExhausted,
                "dataset exhausted: the batch would remove every remaining row");
  }
  RemovalOutcome outcome;
  for (RowId row : rows) {
    RemovalOutcome one = UnlearnSpn(spn, row, options);
    outcome.rows.push_back(row);
    outcome.actions.insert(outcome.actions.end(),
                           std::make_move_iterator(one.actions.begin()),
                           std::make_move_iterator(one.actions.end()));
  }
  return outcome;
}

}  // namespace unlearnspn
