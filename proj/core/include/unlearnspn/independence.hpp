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
#include <vector>

#include "unlearnspn/dataset.hpp"

namespace unlearnspn {

struct IndependenceConfig {
  std::uint32_t num_features = 20;  // random sine features per variable
  double scale = 1.0 / 6.0;         // projection scale
  double threshold = 0.3;           // dependency threshold on the coefficient
  double ridge = 1e-6;              // relative ridge on feature covariances

  bool operator==(const IndependenceConfig&) const = default;
};

// Pairwise randomized dependency coefficients over a scope plus the variable
// split they induce. The projections are drawn once from the node seed and
// reused verbatim when the analysis is recomputed on fewer rows.
struct IndependenceModel {
  IndependenceConfig config;
  std::vector<VarIndex> scope;
  std::vector<double> weights;  // scope.size() x num_features
  std::vector<double> phases;   // scope.size() x num_features
  std::vector<double> coefficients;  // scope.size()^2, symmetric, unit diagonal
  // Partition of the scope (variable indices), ordered by smallest member.
  std::vector<std::vector<VarIndex>> components;
  std::uint64_t num_rows = 0;

  double coefficient(std::size_t i, std::size_t j) const {
    return coefficients[i * scope.size() + j];
  }
  bool adjacent(std::size_t i, std::size_t j) const {
    return coefficient(i, j) >= config.threshold;
  }
  bool independencies_exist() const { return components.size() >= 2; }

  bool operator==(const IndependenceModel&) const = default;
};

// Requires at least two variables in scope and a non-empty view.
IndependenceModel FitIndependence(const DataView& view, std::uint64_t node_seed,
                                  const IndependenceConfig& config);

struct IndependenceRemoval {
  bool changed = false;  // the component partition differs
  IndependenceModel model;
};

// Recomputes the coefficients on `survivors` with the stored projections.
IndependenceRemoval RemoveFromIndependence(const IndependenceModel& model,
                                           const DataView& survivors);

// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n);

  std::size_t Find(std::size_t x);
  bool Union(std::size_t a, std::size_t b);
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Components of a symmetric boolean adjacency matrix (row-major, n x n) as
// index sets: members ascending, components ordered by smallest member.
std::vector<std::vector<std::size_t>> ConnectedComponents(
    const std::vector<bool>& adjacency, std::size_t n);

}  // namespace unlearnspn
