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
#include <optional>
#include <vector>

#include "unlearnspn/dataset.hpp"

namespace unlearnspn {

enum class ClusteringStrategy : std::uint8_t {
  // Lloyd iterations on raw means; removal always re-runs Lloyd from the
  // stored initialization.
  kReplay = 0,
  // Centroids snapped to a seeded lattice after every update (Q-k-Means
  // style). Removal first tries a cheap per-iteration check and falls back
  // to replay when it cannot prove the outcome.
  kQuantized = 1,
};

struct ClusteringConfig {
  std::uint32_t k = 2;
  ClusteringStrategy strategy = ClusteringStrategy::kQuantized;
  // Lattice step in normalized units, i.e. a fraction of the declared range.
  double quantum = 0.05;
  std::uint32_t max_iterations = 100;
  // Keep per-iteration sums for the quantized removal check.
  bool record_trajectory = true;

  bool operator==(const ClusteringConfig&) const = default;
};

// Centroids, per-cluster sums and counts after one Lloyd update.
struct ClusteringIteration {
  std::vector<double> centroids;  // k x dim
  std::vector<double> sums;       // k x dim
  std::vector<std::uint64_t> counts;

  bool operator==(const ClusteringIteration&) const = default;
};

// A fitted clustering with everything needed to replay it on a subset.
// Rows are encoded in [0, 1]^dim: gaussian values normalized by their
// declared bounds, categorical values one-hot.
struct ClusteringModel {
  ClusteringConfig config;
  std::vector<VarIndex> scope;
  std::size_t dim = 0;
  std::vector<double> init_centroids;   // k x dim, drawn from the node seed
  std::vector<double> phases;           // dim, lattice offsets (quantized)
  std::vector<double> final_centroids;  // k x dim
  std::vector<RowId> rows;              // ascending
  std::vector<std::uint32_t> assignment;  // parallel to rows
  std::vector<std::uint64_t> cluster_counts;
  std::vector<ClusteringIteration> trajectory;
  std::uint32_t iterations = 0;
  bool converged = false;

  // At least two non-empty clusters.
  bool clusters_exist() const;
  // Indices of non-empty clusters, ascending.
  std::vector<std::uint32_t> NonEmptyClusters() const;
  std::optional<std::uint32_t> ClusterOf(RowId row) const;

  bool operator==(const ClusteringModel&) const = default;
};

// Deterministic in (view contents, node_seed, config). Initial centroids are
// uniform draws inside the declared bounds, never sampled rows, so they do
// not depend on which rows are present.
ClusteringModel FitClusters(const DataView& view, std::uint64_t node_seed,
                            const ClusteringConfig& config);

struct ClusterRemoval {
  bool changed = false;
  // True when the quantized check decided without re-running Lloyd.
  bool fast_path = false;
  // The clustering of the surviving rows.
  ClusteringModel model;
};

// `changed` is false iff FitClusters on the surviving rows with the same
// seed yields the same labelled assignment and the same non-empty clusters.
// Throws Error(kRowAbsent) if `row` was not clustered.
ClusterRemoval RemoveFromClusters(const ClusteringModel& model,
                                  const Dataset& dataset, RowId row);

// Same non-empty clusters and same label for every row `a` and `b` share.
bool SamePartition(const ClusteringModel& a, const ClusteringModel& b);

}  // namespace unlearnspn
