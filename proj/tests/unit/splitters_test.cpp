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

#include "oracles.hpp"
#include "unlearnspn/clustering.hpp"
#include "unlearnspn/error.hpp"
#include "unlearnspn/independence.hpp"
#include "unlearnspn/random.hpp"

namespace unlearnspn {
namespace {

std::shared_ptr<const Dataset> Column(const std::vector<double>& values, double lo, double hi) {
  std::vector<std::vector<double>> rows;
  for (double v : values) rows.push_back({v});
  return oracle::Rows(oracle::GaussianSchema(1, lo, hi), rows);
}

std::vector<double> TwoBlobs(std::size_t per_blob) {
  std::vector<double> values(per_blob, 0.0);
  values.resize(2 * per_blob, 10.0);
  return values;
}

TEST(FitClusters, TwoSeparatedBlobs) {
  const auto data = Column(TwoBlobs(10), 0.0, 10.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ClusteringModel m = FitClusters(DataView::Full(*data), seed, {});
    ASSERT_TRUE(m.clusters_exist());
    const auto live = m.NonEmptyClusters();
    ASSERT_EQ(live.size(), 2u);
    EXPECT_EQ(m.cluster_counts[live[0]], 10u);
    EXPECT_EQ(m.cluster_counts[live[1]], 10u);
    for (std::size_t i = 1; i < 10; ++i) EXPECT_EQ(m.assignment[i], m.assignment[0]);
    EXPECT_NE(m.assignment[0], m.assignment[10]);
  }
}

TEST(FitClusters, ConvergesToALloydFixedPoint) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> values;
    for (int i = 0; i < 40; ++i) values.push_back(rng.Uniform());
    const auto data = Column(values, 0.0, 1.0);
    ClusteringConfig config;
    config.k = 2 + static_cast<std::uint32_t>(trial % 3);
    config.max_iterations = 1000;
    const ClusteringModel m = FitClusters(DataView::Full(*data), rng.Next(), config);
    ASSERT_TRUE(m.converged);
    EXPECT_TRUE(oracle::IsLloydFixedPoint(values, m.final_centroids, m.assignment,
                                          config.quantum / 2 + 1e-12));
  }
}

TEST(FitClusters, IdenticalRowsShareOneCluster) {
  const auto data = Column(std::vector<double>(15, 4.0), 0.0, 10.0);
  const ClusteringModel m = FitClusters(DataView::Full(*data), 11, {});
  EXPECT_FALSE(m.clusters_exist());
  EXPECT_EQ(m.NonEmptyClusters().size(), 1u);
}

TEST(FitClusters, Deterministic) {
  Rng rng(5);
  std::vector<double> values;
  for (int i = 0; i < 60; ++i) values.push_back(rng.Uniform(0, 10));
  const auto data = Column(values, 0.0, 10.0);
  EXPECT_EQ(FitClusters(DataView::Full(*data), 99, {}), FitClusters(DataView::Full(*data), 99, {}));
}

TEST(RemoveFromClusters, TightBlobMemberIsUnchanged) {
  const auto data = Column(TwoBlobs(10), 0.0, 10.0);
  const ClusteringModel m = FitClusters(DataView::Full(*data), 1, {});
  for (RowId r = 0; r < 20; ++r) {
    const ClusterRemoval removal = RemoveFromClusters(m, *data, r);
    EXPECT_FALSE(removal.changed) << r;
    EXPECT_EQ(removal.model.rows.size(), 19u);
  }
}

TEST(RemoveFromClusters, SingletonClusterIsChanged) {
  std::vector<double> values(10, 0.0);
  values.push_back(10.0);
  const auto data = Column(values, 0.0, 10.0);
  const ClusteringModel m = FitClusters(DataView::Full(*data), 2, {});
  ASSERT_EQ(m.NonEmptyClusters().size(), 2u);
  const ClusterRemoval removal = RemoveFromClusters(m, *data, 10);
  EXPECT_TRUE(removal.changed);
  EXPECT_FALSE(removal.model.clusters_exist());
}

TEST(RemoveFromClusters, UnknownRow) {
  const auto data = Column(TwoBlobs(3), 0.0, 10.0);
  const ClusteringModel m = FitClusters(DataView(*data, {0, 1, 3, 4}, {0}), 2, {});
  EXPECT_THROW(RemoveFromClusters(m, *data, 2), Error);
}

// Unchanged verdicts must mean a refit on the survivors lands on the same
// partition; changed verdicts must mean it does not.
TEST(RemoveFromClusters, VerdictAgreesWithRefitOn500Cases) {
  Rng rng(17);
  int unchanged = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 5 + rng.Below(25);
    const std::size_t vars = 1 + rng.Below(3);
    std::vector<std::vector<double>> rows(n);
    for (auto& row : rows) {
      const double centre = rng.Below(3) * 3.0;
      for (std::size_t v = 0; v < vars; ++v) row.push_back(centre + rng.Normal());
    }
    const auto data = oracle::Rows(oracle::GaussianSchema(vars), rows);
    ClusteringConfig config;
    config.k = 2 + static_cast<std::uint32_t>(rng.Below(2));
    if (trial % 2) config.strategy = ClusteringStrategy::kReplay;
    const std::uint64_t seed = rng.Next();
    const DataView view = DataView::Full(*data);
    const ClusteringModel m = FitClusters(view, seed, config);
    const auto row = static_cast<RowId>(rng.Below(n));
    const ClusterRemoval removal = RemoveFromClusters(m, *data, row);
    const ClusteringModel refit = FitClusters(view.WithoutRow(row), seed, config);
    ASSERT_EQ(removal.changed, !SamePartition(m, refit)) << "trial " << trial;
    EXPECT_EQ(removal.model.assignment, refit.assignment);
    EXPECT_EQ(removal.model.final_centroids, refit.final_centroids);
    unchanged += !removal.changed;
  }
  EXPECT_GT(unchanged, 0);
}

TEST(FitIndependence, IndependentUniformColumnsSplit) {
  int split = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(1000 + seed);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 200; ++i) rows.push_back({rng.Uniform(), rng.Uniform()});
    const auto data = oracle::Rows(oracle::GaussianSchema(2, 0.0, 1.0), rows);
    const IndependenceModel m = FitIndependence(DataView::Full(*data), seed, {});
    split += m.independencies_exist();
  }
  EXPECT_GE(split, 18);
}

TEST(FitIndependence, IdenticalColumnsStayTogether) {
  Rng rng(4);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 200; ++i) {
    const double x = rng.Uniform();
    rows.push_back({x, x});
  }
  const auto data = oracle::Rows(oracle::GaussianSchema(2, 0.0, 1.0), rows);
  const IndependenceModel m = FitIndependence(DataView::Full(*data), 8, {});
  EXPECT_GT(m.coefficient(0, 1), 0.99);
  EXPECT_TRUE(m.adjacent(0, 1));
  EXPECT_EQ(m.components.size(), 1u);
}

TEST(FitIndependence, ComponentsFollowTheAdjacency) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 60; ++i) {
      const double a = rng.Normal();
      const double b = rng.Normal();
      rows.push_back({a, b, a + 0.1 * rng.Normal(), rng.Normal(), b * b});
    }
    const auto data = oracle::Rows(oracle::GaussianSchema(5, -20, 20), rows);
    const IndependenceModel m = FitIndependence(DataView::Full(*data), rng.Next(), {});
    std::vector<bool> adj(25);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) adj[i * 5 + j] = i != j && m.adjacent(i, j);
    }
    const auto expected = oracle::Components(adj, 5);
    ASSERT_EQ(m.components.size(), expected.size());
    for (std::size_t c = 0; c < expected.size(); ++c) {
      EXPECT_EQ(m.components[c], std::vector<VarIndex>(expected[c].begin(), expected[c].end()));
    }
  }
}

TEST(RemoveFromIndependence, VerdictMatchesDirectRecomputation) {
  Rng rng(21);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 500; ++i) rows.push_back({rng.Uniform(), rng.Uniform(), rng.Uniform()});
  const auto data = oracle::Rows(oracle::GaussianSchema(3, 0.0, 1.0), rows);
  const DataView view = DataView::Full(*data);
  const IndependenceModel m = FitIndependence(view, 5, {});
  for (RowId r = 0; r < 20; ++r) {
    const DataView survivors = view.WithoutRow(r * 25);
    const IndependenceRemoval removal = RemoveFromIndependence(m, survivors);
    const IndependenceModel refit = FitIndependence(survivors, 5, {});
    EXPECT_EQ(removal.changed, refit.components != m.components);
    EXPECT_EQ(removal.model, refit);
  }
}

TEST(RemoveFromIndependence, LoneCorrelatedRowChangesTheSplit) {
  const auto data = oracle::Rows(oracle::GaussianSchema(2), {{0, 0}, {0, 0}, {1, 1}});
  const DataView view = DataView::Full(*data);
  const IndependenceModel m = FitIndependence(view, 3, {});
  ASSERT_EQ(m.components.size(), 1u);
  const IndependenceRemoval removal = RemoveFromIndependence(m, view.WithoutRow(2));
  EXPECT_TRUE(removal.changed);
  EXPECT_EQ(removal.model.components.size(), 2u);
}

TEST(RemoveFromIndependence, CoarsestPartitionStaysPut) {
  Rng rng(8);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) {
    const double x = rng.Uniform(-5, 5);
    rows.push_back({x, 2 * x});
  }
  const auto data = oracle::Rows(oracle::GaussianSchema(2), rows);
  const DataView view = DataView::Full(*data);
  const IndependenceModel m = FitIndependence(view, 3, {});
  ASSERT_EQ(m.components.size(), 1u);
  for (RowId r = 0; r < 40; ++r) {
    EXPECT_FALSE(RemoveFromIndependence(m, view.WithoutRow(r)).changed);
  }
}

TEST(ConnectedComponents, Examples) {
  std::vector<bool> identity(16, false);
  for (std::size_t i = 0; i < 4; ++i) identity[i * 4 + i] = true;
  EXPECT_EQ(ConnectedComponents(identity, 4).size(), 4u);
  EXPECT_EQ(ConnectedComponents(std::vector<bool>(16, true), 4).size(), 1u);

  std::vector<bool> pairs(16, false);
  pairs[0 * 4 + 1] = pairs[1 * 4 + 0] = true;
  pairs[2 * 4 + 3] = pairs[3 * 4 + 2] = true;
  EXPECT_EQ(ConnectedComponents(pairs, 4),
            (std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}}));

  std::vector<bool> edge(9, false);
  edge[0 * 3 + 1] = edge[1 * 3 + 0] = true;
  EXPECT_EQ(ConnectedComponents(edge, 3), (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
}

TEST(ConnectedComponents, MatchesTransitiveClosureOnRandomGraphs) {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.Below(9);
    std::vector<bool> adj(n * n, false);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.Uniform() < 0.2) adj[i * n + j] = adj[j * n + i] = true;
      }
    }
    EXPECT_EQ(ConnectedComponents(adj, n), oracle::Components(adj, n));
  }
}

TEST(DisjointSet, UnionReportsMerges) {
  DisjointSet ds(5);
  EXPECT_TRUE(ds.Union(0, 1));
  EXPECT_TRUE(ds.Union(3, 4));
  EXPECT_FALSE(ds.Union(1, 0));
  EXPECT_TRUE(ds.Union(1, 4));
  EXPECT_EQ(ds.Find(0), ds.Find(3));
  EXPECT_NE(ds.Find(2), ds.Find(0));
}

}  // namespace
}  // namespace unlearnspn
