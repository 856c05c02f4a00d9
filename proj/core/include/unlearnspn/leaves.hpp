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
#include <span>
#include <variant>
#include <vector>

#include "unlearnspn/dataset.hpp"

namespace unlearnspn {

// Floor on the standard deviation used only when evaluating densities.
inline constexpr double kSigmaMin = 1e-6;

enum class RemovalMode : std::uint8_t {
  kIncremental = 0,  // subtract the point from running sums
  kExactReplay = 1,  // recompute from the surviving rows, bit-identical to a refit
};

// Neumaier-compensated running sum. Removal is addition of the negation.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void Add(double x);
  double value() const { return sum + compensation; }

  bool operator==(const CompensatedSum&) const = default;
};

// Sufficient statistics of a univariate Gaussian with population variance.
// Values are accumulated relative to `shift` (the first value seen at
// creation) to keep cancellation in the variance small.
struct GaussianLeafStats {
  std::uint64_t n = 0;
  double shift = 0.0;
  CompensatedSum sum;     // sum of (v - shift)
  CompensatedSum sum_sq;  // sum of (v - shift)^2

  static GaussianLeafStats FromValues(std::span<const double> values);

  void Add(double value);
  void Remove(double value);

  double mean() const;
  double variance() const;  // clamped at 0

  bool operator==(const GaussianLeafStats&) const = default;
};

struct CategoricalLeafStats {
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;
  double alpha = 0.0;  // additive smoothing, 0 by default

  static CategoricalLeafStats FromValues(std::span<const double> codes,
                                         std::size_t num_categories,
                                         double alpha);

  void Remove(double code);
  double probability(std::size_t code) const;

  bool operator==(const CategoricalLeafStats&) const = default;
};

using LeafStats = std::variant<GaussianLeafStats, CategoricalLeafStats>;

// Statistics of `var` over the view's rows, accumulated in ascending row order.
LeafStats ComputeLeafStats(const DataView& view, VarIndex var,
                           double categorical_alpha = 0.0);

// Removes one observation with value `value`. Throws Error(kEmpty) if the
// leaf would become empty, Error(kRowAbsent) for a categorical value with a
// zero count.
void RemoveValue(LeafStats& stats, double value);

// Natural-log density (gaussian, sigma floored at kSigmaMin) or mass
// (categorical, -inf for an unseen category).
double LeafLogDensity(const LeafStats& stats, double value);

std::uint64_t LeafCount(const LeafStats& stats);

}  // namespace unlearnspn
