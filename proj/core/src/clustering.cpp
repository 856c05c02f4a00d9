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

#include "unlearnspn/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unlearnspn/error.hpp"
#include "unlearnspn/random.hpp"

namespace unlearnspn {
namespace {

// How close (in lattice steps) a mean may come to a rounding boundary
// before the quantized removal check gives up and replays.
constexpr double kLatticeMargin = 1e-6;

std::size_t EncodedDim(const Schema& schema, const std::vector<VarIndex>& scope) {
  std::size_t dim = 0;
  for (VarIndex v : scope) {
    const Variable& var = schema.variable(v);
    dim += var.kind == VarKind::kCategorical ? var.categories.size() : 1;
  }
  return dim;
}

void EncodeRow(const Dataset& dataset, const std::vector<VarIndex>& scope,
               RowId row, double* out) {
  for (VarIndex v : scope) {
    const Variable& var = dataset.schema().variable(v);
    const double value = dataset.value(row, v);
    if (var.kind == VarKind::kCategorical) {
      const auto code = static_cast<std::size_t>(value);
      for (std::size_t c = 0; c < var.categories.size(); ++c) {
        *out++ = c == code ? 1.0 : 0.0;
      }
    } else {
      *out++ = (value - var.lo) / (var.hi - var.lo);
    }
  }
}

std::vector<double> EncodeRows(const Dataset& dataset,
                               const std::vector<VarIndex>& scope,
                               const std::vector<RowId>& rows, std::size_t dim) {
  std::vector<double> encoded(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EncodeRow(dataset, scope, rows[i], encoded.data() + i * dim);
  }
  return encoded;
}

std::uint32_t Nearest(const double* point, const std::vector<double>& centroids,
                      std::uint32_t k, std::size_t dim) {
  std::uint32_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint32_t c = 0; c < k; ++c) {
    const double* centroid = centroids.data() + c * dim;
    double dist = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = point[j] - centroid[j];
      dist += d * d;
    }
    if (dist < best_dist) {  // ties keep the lower index
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

double LatticePosition(double mean, double phase, double quantum) {
  return (mean - phase) / quantum;
}

double Snap(double position, double phase, double quantum) {
  return phase + quantum * std::floor(position + 0.5);
}

// Runs Lloyd from model.init_centroids over `encoded` and fills the result
// fields of `model`.
void RunLloyd(ClusteringModel& model, const std::vector<double>& encoded) {
  const std::uint32_t k = model.config.k;
  const std::size_t dim = model.dim;
  const std::size_t n = model.rows.size();
  const bool quantized = model.config.strategy == ClusteringStrategy::kQuantized;
  const bool record = quantized && model.config.record_trajectory;

  model.trajectory.clear();
  model.iterations = 0;
  model.converged = false;
  model.assignment.assign(n, 0);

  std::vector<double> previous = model.init_centroids;
  std::vector<double> next(k * dim);
  std::vector<double> sums(k * dim);
  std::vector<std::uint64_t> counts(k);
  do {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* point = encoded.data() + i * dim;
      const std::uint32_t c = Nearest(point, previous, k, dim);
      model.assignment[i] = c;
      ++counts[c];
      double* sum = sums.data() + c * dim;
      for (std::size_t j = 0; j < dim; ++j) sum[j] += point[j];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < dim; ++j) {
        const std::size_t at = c * dim + j;
        if (counts[c] == 0) {
          next[at] = previous[at];
          continue;
        }
        const double mean = sums[at] / static_cast<double>(counts[c]);
        next[at] = quantized
                       ? Snap(LatticePosition(mean, model.phases[j],
                                              model.config.quantum),
                              model.phases[j], model.config.quantum)
                       : mean;
      }
    }
    if (record) model.trajectory.push_back({next, sums, counts});
    ++model.iterations;
    if (next == previous) {
      model.converged = true;
      break;
    }
    previous = next;
  } while (model.iterations < model.config.max_iterations);

  model.final_centroids = next;
  model.cluster_counts = counts;
}

ClusteringModel Refit(const ClusteringModel& base, const Dataset& dataset,
                      std::vector<RowId> rows) {
  ClusteringModel model;
  model.config = base.config;
  model.scope = base.scope;
  model.dim = base.dim;
  model.init_centroids = base.init_centroids;
  model.phases = base.phases;
  model.rows = std::move(rows);
  RunLloyd(model, EncodeRows(dataset, model.scope, model.rows, model.dim));
  return model;
}

// Proves, iteration by iteration, that dropping `point` leaves every
// quantized centroid in place. On success returns the updated model.
std::optional<ClusteringModel> TryQuantizedRemoval(const ClusteringModel& model,
                                                   const std::vector<double>& point,
                                                   std::size_t position) {
  if (model.trajectory.size() != model.iterations) return std::nullopt;
  const std::uint32_t k = model.config.k;
  const std::size_t dim = model.dim;
  std::vector<std::uint32_t> labels(model.iterations);
  for (std::uint32_t it = 0; it < model.iterations; ++it) {
    const auto& previous =
        it == 0 ? model.init_centroids : model.trajectory[it - 1].centroids;
    const ClusteringIteration& step = model.trajectory[it];
    const std::uint32_t c = Nearest(point.data(), previous, k, dim);
    labels[it] = c;
    const std::uint64_t remaining = step.counts[c] - 1;
    if (remaining == 0) return std::nullopt;
    for (std::size_t j = 0; j < dim; ++j) {
      const std::size_t at = c * dim + j;
      const double mean =
          (step.sums[at] - point[j]) / static_cast<double>(remaining);
      const double pos =
          LatticePosition(mean, model.phases[j], model.config.quantum);
      const double frac = pos - std::floor(pos);
      if (!(std::abs(frac - 0.5) > kLatticeMargin)) return std::nullopt;
      const double snapped = Snap(pos, model.phases[j], model.config.quantum);
      if (snapped != step.centroids[at]) return std::nullopt;
    }
  }
  ClusteringModel updated = model;
  for (std::uint32_t it = 0; it < model.iterations; ++it) {
    ClusteringIteration& step = updated.trajectory[it];
    const std::uint32_t c = labels[it];
    --step.counts[c];
    for (std::size_t j = 0; j < dim; ++j) step.sums[c * dim + j] -= point[j];
  }
  --updated.cluster_counts[updated.assignment[position]];
  updated.rows.erase(updated.rows.begin() + static_cast<std::ptrdiff_t>(position));
  updated.assignment.erase(updated.assignment.begin() +
                           static_cast<std::ptrdiff_t>(position));
  return updated;
}

}  // namespace

bool ClusteringModel::clusters_exist() const {
  return NonEmptyClusters().size() >= 2;
}

std::vector<std::uint32_t> ClusteringModel::NonEmptyClusters() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 0; c < cluster_counts.size(); ++c) {
    if (cluster_counts[c] > 0) out.push_back(c);
  }
  return out;
}

std::optional<std::uint32_t> ClusteringModel::ClusterOf(RowId row) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), row);
  if (it == rows.end() || *it != row) return std::nullopt;
  return assignment[static_cast<std::size_t>(it - rows.begin())];
}

ClusteringModel FitClusters(const DataView& view, std::uint64_t node_seed,
                            const ClusteringConfig& config) {
  if (config.k < 2) throw Error(ErrorCode::kUsage, "clustering needs k >= 2");
  if (view.empty() || view.scope().empty()) {
    throw Error(ErrorCode::kEmpty, "cannot cluster an empty view");
  }
  ClusteringModel model;
  model.config = config;
  model.scope = view.scope();
  model.dim = EncodedDim(view.dataset().schema(), model.scope);

  Rng rng(DeriveChildSeed(node_seed, kClusteringStream));
  model.init_centroids.resize(config.k * model.dim);
  for (double& x : model.init_centroids) x = rng.Uniform();
  model.phases.resize(model.dim);
  for (double& p : model.phases) p = rng.Uniform(0.0, config.quantum);

  model.rows = view.rows();
  RunLloyd(model, EncodeRows(view.dataset(), model.scope, model.rows, model.dim));
  return model;
}

ClusterRemoval RemoveFromClusters(const ClusteringModel& model,
                                  const Dataset& dataset, RowId row) {
  const auto it = std::lower_bound(model.rows.begin(), model.rows.end(), row);
  if (it == model.rows.end() || *it != row) {
    throw Error(ErrorCode::kRowAbsent,
                "row " + std::to_string(row) + " is not assigned to a cluster");
  }
  const auto position = static_cast<std::size_t>(it - model.rows.begin());

  if (model.config.strategy == ClusteringStrategy::kQuantized) {
    std::vector<double> point(model.dim);
    EncodeRow(dataset, model.scope, row, point.data());
    if (auto updated = TryQuantizedRemoval(model, point, position)) {
      return {false, true, std::move(*updated)};
    }
  }

  std::vector<RowId> survivors = model.rows;
  survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(position));
  ClusteringModel refit = Refit(model, dataset, std::move(survivors));
  const bool changed = !SamePartition(model, refit);
  return {changed, false, std::move(refit)};
}

bool SamePartition(const ClusteringModel& a, const ClusteringModel& b) {
  if (a.NonEmptyClusters() != b.NonEmptyClusters()) return false;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.rows.size() && j < b.rows.size()) {
    if (a.rows[i] < b.rows[j]) {
      ++i;
    } else if (b.rows[j] < a.rows[i]) {
      ++j;
    } else {
      if (a.assignment[i] != b.assignment[j]) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

}  // namespace unlearnspn
