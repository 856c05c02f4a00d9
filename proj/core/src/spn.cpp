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

#include "unlearnspn/spn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "unlearnspn/error.hpp"

namespace unlearnspn {
namespace {

constexpr std::array<std::string_view, kNumOps> kOpNames = {"CL", "NF", "SU",
                                                           "SD", "SV"};

class Validator {
 public:
  explicit Validator(const Dataset& dataset) : dataset_(dataset) {}

  void Check(const Node& node) {
    const NodeState& st = node.state;
    const std::string where = FormatPath(st.path);
    if (st.num_data != st.data.size()) {
      Report(where, "num_data " + std::to_string(st.num_data) + " != |data| " +
                        std::to_string(st.data.size()));
    }
    if (st.data.empty()) Report(where, "node has no rows");
    if (!std::is_sorted(st.data.begin(), st.data.end()) ||
        std::adjacent_find(st.data.begin(), st.data.end()) != st.data.end()) {
      Report(where, "row set is not strictly ascending");
    }
    if (!st.data.empty() && st.data.back() >= dataset_.num_rows()) {
      Report(where, "row id outside the dataset");
    }
    if (st.scope.empty()) Report(where, "empty scope");
    if (st.all_uninformative && !st.exist_uninformative) {
      Report(where, "all_uninformative without exist_uninformative");
    }
    if ((st.op == Op::kSplitData) != st.clustering.has_value()) {
      Report(where, "clustering must be stored exactly at SD nodes");
    }
    if ((st.op == Op::kSplitVariables) != st.variable_split.has_value()) {
      Report(where, "variable split must be stored exactly at SV nodes");
    }
    if (st.clustering && st.clustering->rows != st.data) {
      Report(where, "clustering rows differ from node rows");
    }
    switch (node.kind) {
      case NodeKind::kLeaf:
        CheckLeaf(node, where);
        break;
      case NodeKind::kSum:
        CheckSum(node, where);
        break;
      case NodeKind::kProduct:
        CheckProduct(node, where);
        break;
    }
    for (const Node& child : node.children) Check(child);
  }

  std::vector<Violation> Take() { return std::move(violations_); }

  void Report(const std::string& path, std::string message) {
    violations_.push_back({path, std::move(message)});
  }

 private:
  void CheckLeaf(const Node& node, const std::string& where) {
    const NodeState& st = node.state;
    if (st.op != Op::kCreateLeaf) Report(where, "leaf not created by CL");
    if (st.scope.size() != 1) Report(where, "leaf scope is not a single variable");
    if (!node.children.empty()) Report(where, "leaf has children");
    if (!node.leaf) {
      Report(where, "leaf without statistics");
      return;
    }
    if (LeafCount(*node.leaf) != st.num_data) {
      Report(where, "leaf statistics count differs from num_data");
    }
    if (!st.scope.empty()) {
      const bool categorical = dataset_.schema().variable(st.scope.front()).kind ==
                               VarKind::kCategorical;
      if (categorical != std::holds_alternative<CategoricalLeafStats>(*node.leaf)) {
        Report(where, "leaf distribution does not match the variable kind");
      }
    }
  }

  void CheckSum(const Node& node, const std::string& where) {
    const NodeState& st = node.state;
    if (st.op != Op::kSplitData) Report(where, "sum node not created by SD");
    if (node.children.size() < 2) Report(where, "sum node with fewer than 2 children");
    if (node.child_counts.size() != node.children.size()) {
      Report(where, "child_counts size differs from number of children");
      return;
    }
    std::uint64_t total = 0;
    std::vector<RowId> merged;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const NodeState& cs = node.children[i].state;
      total += node.child_counts[i];
      if (node.child_counts[i] != cs.data.size()) {
        Report(where, "child " + std::to_string(i) + " count " +
                          std::to_string(node.child_counts[i]) + " != its rows " +
                          std::to_string(cs.data.size()));
      }
      if (cs.scope != st.scope) {
        Report(where, "completeness: child " + std::to_string(i) +
                          " scope differs from the sum node scope");
      }
      merged.insert(merged.end(), cs.data.begin(), cs.data.end());
    }
    if (total != st.num_data) {
      Report(where, "child counts sum to " + std::to_string(total) +
                        " but num_data is " + std::to_string(st.num_data));
    }
    std::sort(merged.begin(), merged.end());
    if (std::adjacent_find(merged.begin(), merged.end()) != merged.end()) {
      Report(where, "children share rows");
    }
    if (merged != st.data) Report(where, "children rows do not union to node rows");
  }

  void CheckProduct(const Node& node, const std::string& where) {
    const NodeState& st = node.state;
    if (st.op != Op::kNaiveFactorization && st.op != Op::kSplitUninformative &&
        st.op != Op::kSplitVariables) {
      Report(where, "product node created by " + std::string(OpName(st.op)));
    }
    if (node.children.size() < 2) {
      Report(where, "product node with fewer than 2 children");
    }
    std::vector<VarIndex> merged;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const NodeState& cs = node.children[i].state;
      merged.insert(merged.end(), cs.scope.begin(), cs.scope.end());
      if (cs.data != st.data) {
        Report(where, "child " + std::to_string(i) + " rows differ from the product rows");
      }
      if (st.op == Op::kNaiveFactorization &&
          node.children[i].kind != NodeKind::kLeaf) {
        Report(where, "naive factorization child is not a leaf");
      }
      if (st.op == Op::kSplitUninformative && i + 1 < node.children.size() &&
          node.children[i].kind != NodeKind::kLeaf) {
        Report(where, "uninformative split child before the last is not a leaf");
      }
    }
    std::sort(merged.begin(), merged.end());
    if (std::adjacent_find(merged.begin(), merged.end()) != merged.end()) {
      Report(where, "decomposability: children scopes overlap");
    }
    if (merged != st.scope) {
      Report(where, "decomposability: children scopes do not union to the node scope");
    }
  }

  const Dataset& dataset_;
  std::vector<Violation> violations_;
};

bool Close(double a, double b, double tolerance) {
  if (a == b) return true;
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tolerance * scale;
}

std::string Describe(double a, double b) {
  std::ostringstream out;
  out.precision(17);
  out << a << " vs " << b;
  return out.str();
}

Comparison Differ(const Node& node, std::string detail) {
  return {false, FormatPath(node.state.path), std::move(detail)};
}

Comparison CompareLeaf(const Node& a, const Node& b, double tolerance) {
  if (a.leaf.has_value() != b.leaf.has_value()) return Differ(a, "leaf stats presence");
  if (!a.leaf) return {};
  if (a.leaf->index() != b.leaf->index()) return Differ(a, "leaf distribution kind");
  if (const auto* ga = std::get_if<GaussianLeafStats>(&*a.leaf)) {
    const auto& gb = std::get<GaussianLeafStats>(*b.leaf);
    if (ga->n != gb.n) return Differ(a, "gaussian count");
    if (!Close(ga->mean(), gb.mean(), tolerance)) {
      return Differ(a, "gaussian mean " + Describe(ga->mean(), gb.mean()));
    }
    if (!Close(ga->variance(), gb.variance(), tolerance)) {
      return Differ(a, "gaussian variance " + Describe(ga->variance(), gb.variance()));
    }
    return {};
  }
  const auto& ca = std::get<CategoricalLeafStats>(*a.leaf);
  const auto& cb = std::get<CategoricalLeafStats>(*b.leaf);
  if (ca.counts != cb.counts || ca.n != cb.n) return Differ(a, "categorical counts");
  return {};
}

Comparison CompareState(const Node& a, const Node& b) {
  const NodeState& sa = a.state;
  const NodeState& sb = b.state;
  if (sa.path != sb.path) return Differ(a, "path");
  if (sa.scope != sb.scope) return Differ(a, "scope");
  if (sa.op != sb.op) {
    return Differ(a, "op " + std::string(OpName(sa.op)) + " vs " +
                         std::string(OpName(sb.op)));
  }
  if (sa.num_data != sb.num_data) {
    return Differ(a, "num_data " + std::to_string(sa.num_data) + " vs " +
                         std::to_string(sb.num_data));
  }
  if (sa.data != sb.data) return Differ(a, "row set");
  if (sa.seed != sb.seed) return Differ(a, "node seed");
  if (sa.independencies != sb.independencies) return Differ(a, "independencies flag");
  if (sa.clusters != sb.clusters) return Differ(a, "clusters flag");
  if (sa.exist_uninformative != sb.exist_uninformative ||
      sa.all_uninformative != sb.all_uninformative) {
    return Differ(a, "uninformative flags");
  }
  if (sa.clustering.has_value() != sb.clustering.has_value()) {
    return Differ(a, "clustering presence");
  }
  if (sa.clustering && (sa.clustering->rows != sb.clustering->rows ||
                        !SamePartition(*sa.clustering, *sb.clustering))) {
    return Differ(a, "clustering partition");
  }
  if (sa.variable_split.has_value() != sb.variable_split.has_value()) {
    return Differ(a, "variable split presence");
  }
  if (sa.variable_split &&
      sa.variable_split->components != sb.variable_split->components) {
    return Differ(a, "variable split components");
  }
  if (sa.decision_analyses.has_value() != sb.decision_analyses.has_value()) {
    return Differ(a, "decision analyses presence");
  }
  if (sa.decision_analyses) {
    const auto& da = *sa.decision_analyses;
    const auto& db = *sb.decision_analyses;
    if (da.clustering.rows != db.clustering.rows ||
        !SamePartition(da.clustering, db.clustering) ||
        da.independence.components != db.independence.components) {
      return Differ(a, "decision analyses");
    }
  }
  return {};
}

double LogSumExp(const std::vector<double>& terms) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double t : terms) peak = std::max(peak, t);
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (double t : terms) total += std::exp(t - peak);
  return peak + std::log(total);
}

void Visit(const Node& node, std::size_t depth, TreeStats& stats) {
  ++stats.nodes;
  stats.depth = std::max(stats.depth, depth);
  ++stats.ops[static_cast<std::size_t>(node.state.op)];
  switch (node.kind) {
    case NodeKind::kSum:
      ++stats.sum_nodes;
      break;
    case NodeKind::kProduct:
      ++stats.product_nodes;
      break;
    case NodeKind::kLeaf:
      ++stats.leaves;
      break;
  }
  for (const Node& child : node.children) Visit(child, depth + 1, stats);
}

}  // namespace

std::string_view OpName(Op op) { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> ParseOp(std::string_view name) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == name) return static_cast<Op>(i);
  }
  return std::nullopt;
}

std::string FormatPath(const Path& path) {
  if (path.empty()) return "/";
  std::string out;
  for (std::uint32_t i : path) out += "/" + std::to_string(i);
  return out;
}

double Node::weight(std::size_t child) const {
  return static_cast<double>(child_counts.at(child)) /
         static_cast<double>(state.num_data);
}

std::vector<RowId> Spn::LiveRows() const {
  std::vector<RowId> rows;
  rows.reserve(dataset->num_rows() - removed.size());
  auto tomb = removed.begin();
  for (std::size_t r = 0; r < dataset->num_rows(); ++r) {
    if (tomb != removed.end() && *tomb == r) {
      ++tomb;
      continue;
    }
    rows.push_back(static_cast<RowId>(r));
  }
  return rows;
}

bool Spn::IsRemoved(RowId row) const {
  return std::binary_search(removed.begin(), removed.end(), row);
}

std::vector<Violation> ValidateNode(const Node& root, const Dataset& dataset) {
  Validator validator(dataset);
  validator.Check(root);
  return validator.Take();
}

std::vector<Violation> Validate(const Spn& spn) {
  if (!spn.dataset) return {{"/", "model has no dataset"}};
  Validator validator(*spn.dataset);
  validator.Check(spn.root);
  std::vector<VarIndex> full(spn.dataset->num_vars());
  for (VarIndex v = 0; v < full.size(); ++v) full[v] = v;
  if (spn.root.state.scope != full) {
    validator.Report("/", "root scope is not the full schema");
  }
  if (spn.root.state.data != spn.LiveRows()) {
    validator.Report("/", "root rows differ from the live dataset rows");
  }
  if (!spn.root.state.path.empty()) validator.Report("/", "root path is not empty");
  std::vector<Violation> out = validator.Take();
  VisitNodes(spn.root, [&](const Node& node) {
    for (RowId r : node.state.data) {
      if (spn.IsRemoved(r)) {
        out.push_back({FormatPath(node.state.path),
                       "removed row " + std::to_string(r) + " still present"});
        return;
      }
    }
  });
  return out;
}

double LogLikelihood(const Node& node, const std::vector<double>& assignment) {
  switch (node.kind) {
    case NodeKind::kLeaf:
      return LeafLogDensity(*node.leaf, assignment.at(node.leaf_variable()));
    case NodeKind::kProduct: {
      double total = 0.0;
      for (const Node& child : node.children) total += LogLikelihood(child, assignment);
      return total;
    }
    case NodeKind::kSum: {
      std::vector<double> terms;
      terms.reserve(node.children.size());
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        terms.push_back(std::log(node.weight(i)) +
                        LogLikelihood(node.children[i], assignment));
      }
      return LogSumExp(terms);
    }
  }
  return 0.0;
}

double LogLikelihood(const Spn& spn, const std::vector<double>& assignment) {
  if (assignment.size() != spn.dataset->num_vars()) {
    throw Error(ErrorCode::kSchema, "assignment has " +
                                        std::to_string(assignment.size()) +
                                        " values, model expects " +
                                        std::to_string(spn.dataset->num_vars()));
  }
  return LogLikelihood(spn.root, assignment);
}

Comparison StructuralEqual(const Node& a, const Node& b, double tolerance) {
  if (a.kind != b.kind) return Differ(a, "node kind");
  if (Comparison c = CompareState(a, b); !c) return c;
  if (a.child_counts != b.child_counts) return Differ(a, "child counts");
  if (a.children.size() != b.children.size()) return Differ(a, "number of children");
  if (Comparison c = CompareLeaf(a, b, tolerance); !c) return c;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (Comparison c = StructuralEqual(a.children[i], b.children[i], tolerance); !c) {
      return c;
    }
  }
  return {};
}

Comparison StructuralEqual(const Spn& a, const Spn& b, double tolerance) {
  if (a.removed != b.removed) return {false, "/", "removed row sets"};
  return StructuralEqual(a.root, b.root, tolerance);
}

void VisitNodes(const Node& root, const std::function<void(const Node&)>& fn) {
  fn(root);
  for (const Node& child : root.children) VisitNodes(child, fn);
}

TreeStats ComputeTreeStats(const Node& root) {
  TreeStats stats;
  Visit(root, 0, stats);
  return stats;
}

}  // namespace unlearnspn
