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

#include <numeric>

#include "oracles.hpp"
#include "unlearnspn/error.hpp"
#include "unlearnspn/learn.hpp"
#include "unlearnspn/random.hpp"
#include "unlearnspn/unlearn.hpp"
#include "unlearnspn/verify.hpp"

namespace unlearnspn {
namespace {

LearnConfig Config(std::uint32_t threshold, std::uint64_t seed = 0,
                   RemovalMode mode = RemovalMode::kExactReplay) {
  LearnConfig config;
  config.min_instances = threshold;
  config.master_seed = seed;
  config.removal_mode = mode;
  return config;
}

std::shared_ptr<const Dataset> Blobs(std::size_t first, std::size_t second, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < first + second; ++i) {
    const double c = i < first ? -5.0 : 5.0;
    rows.push_back({c + 0.3 * rng.Normal(), c + 0.3 * rng.Normal()});
  }
  return oracle::Rows(oracle::GaussianSchema(2), rows);
}

void ExpectMatchesOracle(const Spn& spn) {
  const Spn retrained = RetrainOracle(spn.dataset, spn.removed, spn.config);
  const Comparison cmp = StructuralEqual(spn, retrained, ToleranceFor(spn.config.removal_mode));
  EXPECT_TRUE(cmp) << cmp.path << ": " << cmp.detail;
  EXPECT_TRUE(Validate(spn).empty());
}

std::size_t CountActions(const RemovalOutcome& outcome, UnlearnAction action) {
  std::size_t n = 0;
  for (const ActionRecord& a : outcome.actions) n += a.action == action;
  return n;
}

TEST(Revise, LeafStaysALeaf) {
  const auto data = Blobs(5, 5, 1);
  const Spn spn = LearnSpn(data, Config(2));
  const Node* leaf = nullptr;
  VisitNodes(spn.root, [&](const Node& n) {
    if (!leaf && n.kind == NodeKind::kLeaf) leaf = &n;
  });
  ASSERT_NE(leaf, nullptr);
  const RowId row = leaf->state.data.front();
  const DataView survivors(*data, {leaf->state.data.begin() + 1, leaf->state.data.end()},
                           leaf->state.scope);
  EXPECT_EQ(Revise(leaf->state, row, survivors, spn.config).decision.op, Op::kCreateLeaf);
}

TEST(Revise, LastInformativeColumnTurningConstantGivesNaive) {
  const auto data = oracle::Rows(oracle::GaussianSchema(2), {{1, 3}, {1, 3}, {1, 3}, {1, 8}});
  const Spn spn = LearnSpn(data, Config(1));
  ASSERT_EQ(spn.root.state.op, Op::kSplitUninformative);
  const DataView survivors = DataView::Full(*data).WithoutRow(3);
  const Revision r = Revise(spn.root.state, 3, survivors, spn.config);
  EXPECT_EQ(r.decision.op, Op::kNaiveFactorization);
  EXPECT_TRUE(r.decision.all_uninformative);
}

TEST(Revise, SumNodeFallingToTheThresholdGivesNaive) {
  const auto data = Blobs(6, 5, 3);
  const Spn spn = LearnSpn(data, Config(10, 2));
  ASSERT_EQ(spn.root.state.op, Op::kSplitData);
  const DataView survivors = DataView::Full(*data).WithoutRow(0);
  EXPECT_EQ(Revise(spn.root.state, 0, survivors, spn.config).decision.op,
            Op::kNaiveFactorization);
}

TEST(Unlearn, UntouchedSubtreesAreLoggedAsSkipped) {
  Spn spn = LearnSpn(Blobs(30, 30, 4), Config(5, 1));
  ASSERT_EQ(spn.root.state.op, Op::kSplitData);
  const RemovalOutcome outcome = UnlearnSpn(spn, 0);
  EXPECT_GE(CountActions(outcome, UnlearnAction::kSkipped), 1u);
  ExpectMatchesOracle(spn);
}

TEST(Unlearn, SameRowTwiceIsRefused) {
  Spn spn = LearnSpn(Blobs(10, 10, 5), Config(5));
  UnlearnSpn(spn, 4);
  try {
    UnlearnSpn(spn, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRowAbsent);
  }
  EXPECT_THROW(UnlearnSpn(spn, 1000), Error);
}

TEST(Unlearn, LastRowIsRefused) {
  Spn spn = LearnSpn(Blobs(1, 1, 5), Config(5));
  UnlearnSpn(spn, 0);
  try {
    UnlearnSpn(spn, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExhausted);
  }
}

TEST(UnlearnNaive, ConstantColumnsKeepTheirFlags) {
  const auto data = oracle::Rows(oracle::GaussianSchema(2), {{4, 2}, {4, 2}, {4, 2}});
  Spn spn = LearnSpn(data, Config(1));
  ASSERT_TRUE(spn.root.state.all_uninformative);
  UnlearnSpn(spn, 1);
  EXPECT_TRUE(spn.root.state.all_uninformative);
  EXPECT_EQ(spn.root.state.data, (std::vector<RowId>{0, 2}));
  for (const Node& leaf : spn.root.children) EXPECT_EQ(LeafCount(*leaf.leaf), 2u);
  ExpectMatchesOracle(spn);
}

TEST(UnlearnNaive, RemovalThatMakesEverythingConstant) {
  const auto data = oracle::Rows(oracle::GaussianSchema(3), {{1, 1, 0}, {1, 1, 0}, {2, 5, 3}});
  Spn spn = LearnSpn(data, Config(10));
  ASSERT_EQ(spn.root.state.op, Op::kNaiveFactorization);
  ASSERT_FALSE(spn.root.state.exist_uninformative);
  UnlearnSpn(spn, 2);
  EXPECT_TRUE(spn.root.state.exist_uninformative);
  EXPECT_TRUE(spn.root.state.all_uninformative);
  for (const Node& leaf : spn.root.children) {
    EXPECT_EQ(leaf.state.num_data, spn.root.state.num_data);
  }
  ExpectMatchesOracle(spn);
}

TEST(UnlearnLeaf, GaussianAndCategorical) {
  const Schema schema({{"g", VarKind::kGaussian, {}, 0, 10},
                       {"c", VarKind::kCategorical, {"a", "b"}, 0, 0}});
  const auto data = oracle::Rows(schema, {{1, 0}, {2, 0}, {3, 0}});
  Spn spn = LearnSpn(data, Config(10, 0, RemovalMode::kIncremental));
  ASSERT_EQ(spn.root.state.op, Op::kSplitUninformative);
  UnlearnSpn(spn, 2);
  const Node& cat = spn.root.children[0];
  const Node& gauss = spn.root.children[1];
  EXPECT_EQ(std::get<CategoricalLeafStats>(*cat.leaf).counts, (std::vector<std::uint64_t>{2, 0}));
  EXPECT_DOUBLE_EQ(std::get<GaussianLeafStats>(*gauss.leaf).mean(), 1.5);
  EXPECT_EQ(gauss.state.data, (std::vector<RowId>{0, 1}));
  EXPECT_EQ(gauss.state.num_data, 2u);
  ExpectMatchesOracle(spn);
}

TEST(UnlearnSplitUninformative, NewConstantBecomesALeaf) {
  Rng rng(6);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) {
    const double x = rng.Uniform(-3, 3);
    rows.push_back({2.0, i == 7 ? 9.0 : 1.0, x, x + 0.1 * rng.Normal()});
  }
  const auto data = oracle::Rows(oracle::GaussianSchema(4), rows);
  Spn spn = LearnSpn(data, Config(10, 3));
  ASSERT_EQ(spn.root.state.op, Op::kSplitUninformative);
  ASSERT_EQ(spn.root.children.size(), 2u);
  const RemovalOutcome outcome = UnlearnSpn(spn, 7);
  EXPECT_EQ(CountActions(outcome, UnlearnAction::kNewLeavesAdded), 1u);
  ASSERT_EQ(spn.root.children.size(), 3u);
  EXPECT_EQ(spn.root.children[1].state.scope, std::vector<VarIndex>{1});
  EXPECT_EQ(spn.root.children[2].state.scope, (std::vector<VarIndex>{2, 3}));
  ExpectMatchesOracle(spn);
}

TEST(UnlearnSplitUninformative, PlainRecursion) {
  Rng rng(7);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) {
    const double x = rng.Uniform(-3, 3);
    rows.push_back({2.0, x, x + 0.1 * rng.Normal()});
  }
  const auto data = oracle::Rows(oracle::GaussianSchema(3), rows);
  for (RowId row = 0; row < 40; row += 5) {
    Spn spn = LearnSpn(data, Config(10, 3));
    ASSERT_EQ(spn.root.state.op, Op::kSplitUninformative);
    UnlearnSpn(spn, row);
    ExpectMatchesOracle(spn);
  }
}

TEST(UnlearnSplitData, SixHundredFourHundred) {
  Spn spn = LearnSpn(Blobs(600, 400, 2), Config(50, 0));
  ASSERT_EQ(spn.root.state.op, Op::kSplitData);
  const std::size_t big = spn.root.child_counts[0] == 600 ? 0 : 1;
  ASSERT_EQ(spn.root.child_counts[big], 600u);
  const Node sibling = spn.root.children[1 - big];
  const RemovalOutcome outcome = UnlearnSpn(spn, 0);  // row 0 sits in the 600 blob
  ASSERT_EQ(spn.root.state.op, Op::kSplitData);
  EXPECT_EQ(spn.root.child_counts[big], 599u);
  EXPECT_EQ(spn.root.child_counts[1 - big], 400u);
  EXPECT_DOUBLE_EQ(spn.root.weight(big), 599.0 / 999.0);
  EXPECT_DOUBLE_EQ(spn.root.weight(1 - big), 400.0 / 999.0);
  EXPECT_EQ(spn.root.children[1 - big], sibling);
  EXPECT_EQ(outcome.actions.front().action, UnlearnAction::kWeightsUpdated);
}

TEST(UnlearnSplitData, ChangedClusteringRetrains) {
  // Search singleton-cluster data for a root sum node that one removal breaks.
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
    const LearnConfig config = Config(4, seed);
    const auto data = Generate({Generator::kSingletonCluster, 30, 2, seed, config});
    const Spn trained = LearnSpn(data, config);
    if (trained.root.state.op != Op::kSplitData) continue;
    for (RowId row = 0; row < data->num_rows() && !found; ++row) {
      Spn spn = trained;
      const RemovalOutcome outcome = UnlearnSpn(spn, row);
      const UnlearnAction root = outcome.actions.front().action;
      if (root != UnlearnAction::kRetrainedSubtree && root != UnlearnAction::kNaiveFactorized) {
        continue;
      }
      found = true;
      ExpectMatchesOracle(spn);
    }
  }
  EXPECT_TRUE(found);
}

TEST(UnlearnSplitVariables, EveryChildIsVisited) {
  Rng rng(11);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 200; ++i) {
    const double x = rng.Uniform(-4, 4);
    rows.push_back({x, rng.Uniform(-4, 4), x + 0.05 * rng.Normal()});
  }
  const auto data = oracle::Rows(oracle::GaussianSchema(3), rows);
  Spn spn = LearnSpn(data, Config(50, 4));
  ASSERT_EQ(spn.root.state.op, Op::kSplitVariables);
  const IndependenceModel before = *spn.root.state.variable_split;
  const RemovalOutcome outcome = UnlearnSpn(spn, 13);
  ASSERT_EQ(spn.root.state.op, Op::kSplitVariables);
  EXPECT_EQ(spn.root.state.variable_split->weights, before.weights);
  EXPECT_EQ(spn.root.state.variable_split->phases, before.phases);
  for (const Node& child : spn.root.children) EXPECT_EQ(child.state.num_data, 199u);
  EXPECT_EQ(CountActions(outcome, UnlearnAction::kSkipped), 0u);
  ExpectMatchesOracle(spn);
}

TEST(UnlearnBatch, SingletonEqualsSingleRemoval) {
  const auto data = Generate({Generator::kMixed, 60, 4, 2, Config(6)});
  Spn a = LearnSpn(data, Config(6, 1));
  Spn b = a;
  UnlearnSpn(a, 9);
  UnlearnBatch(b, {9});
  EXPECT_EQ(a.root, b.root);
  EXPECT_EQ(a.removed, b.removed);
}

TEST(UnlearnBatch, PairEqualsSequenceEqualsOracle) {
  const auto data = Generate({Generator::kBlobs, 80, 3, 5, Config(6)});
  Spn seq = LearnSpn(data, Config(6, 2));
  Spn batch = seq;
  UnlearnSpn(seq, 3);
  UnlearnSpn(seq, 41);
  UnlearnBatch(batch, {41, 3, 41});
  EXPECT_EQ(seq.root, batch.root);
  EXPECT_EQ(batch.removed, (std::vector<RowId>{3, 41}));
  ExpectMatchesOracle(batch);
}

TEST(UnlearnBatch, EmptyBatchChangesNothing) {
  const auto data = Generate({Generator::kMixed, 30, 3, 2, Config(6)});
  Spn spn = LearnSpn(data, Config(6));
  const Node before = spn.root;
  const RemovalOutcome outcome = UnlearnBatch(spn, {});
  EXPECT_TRUE(outcome.actions.empty());
  EXPECT_EQ(spn.root, before);
}

TEST(UnlearnBatch, ValidatesBeforeTouchingTheModel) {
  const auto data = Generate({Generator::kMixed, 30, 3, 2, Config(6)});
  Spn spn = LearnSpn(data, Config(6));
  const Node before = spn.root;
  EXPECT_THROW(UnlearnBatch(spn, {1, 2, 500}), Error);
  EXPECT_EQ(spn.root, before);
  EXPECT_TRUE(spn.removed.empty());
  std::vector<RowId> all(30);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_THROW(UnlearnBatch(spn, all), Error);
  EXPECT_EQ(spn.root, before);
}

TEST(Unlearn, IncrementalModeStaysWithinTolerance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LearnConfig config = Config(8, seed, RemovalMode::kIncremental);
    const auto data = Generate({Generator::kMixed, 100, 5, seed, config});
    Spn spn = LearnSpn(data, config);
    UnlearnBatch(spn, {static_cast<RowId>(seed), 50, 99});
    ExpectMatchesOracle(spn);
  }
}

}  // namespace
}  // namespace unlearnspn
