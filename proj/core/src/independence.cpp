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

#include "unlearnspn/independence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include "unlearnspn/error.hpp"
#include "unlearnspn/random.hpp"

namespace unlearnspn {
namespace {

using Matrix = Eigen::MatrixXd;

// Empirical CDF: fraction of values <= v. Ties share a value.
Eigen::VectorXd CopulaTransform(const DataView& view, VarIndex var) {
  const std::size_t n = view.size();
  const auto column = view.dataset().column(var);
  std::vector<std::pair<double, std::size_t>> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = {column[view.rows()[i]], i};
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd u(static_cast<Eigen::Index>(n));
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted[j].first == sorted[i].first) ++j;
    const double rank = static_cast<double>(j) / static_cast<double>(n);
    for (std::size_t t = i; t < j; ++t) {
      u[static_cast<Eigen::Index>(sorted[t].second)] = rank;
    }
    i = j;
  }
  return u;
}

// Sine features of the copula values, centred and whitened so that the
// canonical correlations of two blocks are the singular values of
// W_a^T W_b / n.
Matrix WhitenedFeatures(const Eigen::VectorXd& u, const double* weights,
                        const double* phases, const IndependenceConfig& config) {
  const auto n = u.size();
  const auto k = static_cast<Eigen::Index>(config.num_features);
  Matrix features(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index r = 0; r < n; ++r) {
      features(r, j) = std::sin(weights[j] * u[r] + phases[j]);
    }
  }
  features.rowwise() -= features.colwise().mean();
  Matrix cov = features.transpose() * features / static_cast<double>(n);
  const double lambda = config.ridge * cov.trace() / static_cast<double>(k) + 1e-12;
  cov.diagonal().array() += lambda;
  const Eigen::LLT<Matrix> llt(cov);
  // W = F L^{-T}
  return llt.matrixL().solve(features.transpose()).transpose();
}

IndependenceModel Compute(IndependenceModel model, const DataView& view) {
  const std::size_t d = model.scope.size();
  const std::size_t k = model.config.num_features;
  const auto n = static_cast<double>(view.size());
  std::vector<Matrix> whitened;
  whitened.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    whitened.push_back(WhitenedFeatures(CopulaTransform(view, model.scope[i]),
                                        model.weights.data() + i * k,
                                        model.phases.data() + i * k, model.config));
  }
  model.coefficients.assign(d * d, 0.0);
  std::vector<bool> adjacency(d * d, false);
  for (std::size_t i = 0; i < d; ++i) {
    model.coefficients[i * d + i] = 1.0;
    adjacency[i * d + i] = true;
    for (std::size_t j = i + 1; j < d; ++j) {
      const Matrix cross = whitened[i].transpose() * whitened[j] / n;
      const Eigen::JacobiSVD<Matrix> svd(cross);
      const double rho = std::clamp(svd.singularValues()(0), 0.0, 1.0);
      model.coefficients[i * d + j] = rho;
      model.coefficients[j * d + i] = rho;
      const bool dependent = rho >= model.config.threshold;
      adjacency[i * d + j] = dependent;
      adjacency[j * d + i] = dependent;
    }
  }
  model.components.clear();
  for (const auto& component : ConnectedComponents(adjacency, d)) {
    std::vector<VarIndex> vars;
    for (std::size_t i : component) vars.push_back(model.scope[i]);
    model.components.push_back(std::move(vars));
  }
  model.num_rows = view.size();
  return model;
}

}  // namespace

IndependenceModel FitIndependence(const DataView& view, std::uint64_t node_seed,
                                  const IndependenceConfig& config) {
  if (view.scope().size() < 2) {
    throw Error(ErrorCode::kUsage, "independence analysis needs >= 2 variables");
  }
  if (view.empty()) throw Error(ErrorCode::kEmpty, "independence analysis of no rows");
  if (config.num_features == 0) throw Error(ErrorCode::kUsage, "num_features must be > 0");
  IndependenceModel model;
  model.config = config;
  model.scope = view.scope();
  // Projection of the bias-augmented copula value [u, 1]: both weight and
  // phase scaled by s / 2.
  const double scale = config.scale / 2.0;
  Rng rng(DeriveChildSeed(node_seed, kIndependenceStream));
  const std::size_t count = model.scope.size() * config.num_features;
  model.weights.resize(count);
  model.phases.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    model.weights[i] = scale * rng.Normal();
    model.phases[i] = scale * rng.Normal();
  }
  return Compute(std::move(model), view);
}

IndependenceRemoval RemoveFromIndependence(const IndependenceModel& model,
                                           const DataView& survivors) {
  if (survivors.scope() != model.scope) {
    throw Error(ErrorCode::kUsage, "survivor view scope differs from the model");
  }
  if (survivors.empty()) throw Error(ErrorCode::kExhausted, "no surviving rows");
  IndependenceModel refit = model;
  refit = Compute(std::move(refit), survivors);
  const bool changed = refit.components != model.components;
  return {changed, std::move(refit)};
}

DisjointSet::DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSet::Find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSet::Union(std::size_t a, std::size_t b) {
  a = Find(a);
  b = Find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

std::vector<std::vector<std::size_t>> ConnectedComponents(
    const std::vector<bool>& adjacency, std::size_t n) {
  if (adjacency.size() != n * n) {
    throw Error(ErrorCode::kUsage, "adjacency matrix must be n x n");
  }
  DisjointSet sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacency[i * n + j]) sets.Union(i, j);
    }
  }
  // Scanning members in ascending order orders components by smallest member.
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.Find(i);
    if (slot[root] == n) {
      slot[root] = components.size();
      components.emplace_back();
    }
    components[slot[root]].push_back(i);
  }
  return components;
}

}  // namespace unlearnspn
