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

#include "unlearnspn/leaves.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "unlearnspn/error.hpp"

namespace unlearnspn {

void CompensatedSum::Add(double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    compensation += (sum - t) + x;
  } else {
    compensation += (x - t) + sum;
  }
  sum = t;
}

GaussianLeafStats GaussianLeafStats::FromValues(std::span<const double> values) {
  GaussianLeafStats stats;
  if (values.empty()) return stats;
  stats.shift = values.front();
  for (double v : values) stats.Add(v);
  return stats;
}

void GaussianLeafStats::Add(double value) {
  const double d = value - shift;
  sum.Add(d);
  sum_sq.Add(d * d);
  ++n;
}

void GaussianLeafStats::Remove(double value) {
  if (n <= 1) throw Error(ErrorCode::kEmpty, "empty leaf");
  const double d = value - shift;
  sum.Add(-d);
  sum_sq.Add(-(d * d));
  --n;
}

double GaussianLeafStats::mean() const {
  if (n == 0) return shift;
  return shift + sum.value() / static_cast<double>(n);
}

double GaussianLeafStats::variance() const {
  if (n <= 1) return 0.0;
  const double count = static_cast<double>(n);
  const double m = sum.value() / count;
  const double var = sum_sq.value() / count - m * m;
  return var > 0.0 ? var : 0.0;
}

CategoricalLeafStats CategoricalLeafStats::FromValues(
    std::span<const double> codes, std::size_t num_categories, double alpha) {
  CategoricalLeafStats stats;
  stats.counts.assign(num_categories, 0);
  stats.alpha = alpha;
  for (double c : codes) {
    ++stats.counts.at(static_cast<std::size_t>(c));
    ++stats.n;
  }
  return stats;
}

void CategoricalLeafStats::Remove(double code) {
  auto& count = counts.at(static_cast<std::size_t>(code));
  if (count == 0) {
    throw Error(ErrorCode::kRowAbsent, "category has no observations to remove");
  }
  if (n <= 1) throw Error(ErrorCode::kEmpty, "empty leaf");
  --count;
  --n;
}

double CategoricalLeafStats::probability(std::size_t code) const {
  const double k = static_cast<double>(counts.size());
  return (static_cast<double>(counts.at(code)) + alpha) /
         (static_cast<double>(n) + alpha * k);
}

LeafStats ComputeLeafStats(const DataView& view, VarIndex var,
                           double categorical_alpha) {
  if (view.empty()) throw Error(ErrorCode::kEmpty, "cannot create a leaf from no rows");
  std::vector<double> values;
  values.reserve(view.size());
  const auto column = view.dataset().column(var);
  for (RowId r : view.rows()) values.push_back(column[r]);
  const Variable& meta = view.dataset().schema().variable(var);
  if (meta.kind == VarKind::kCategorical) {
    return CategoricalLeafStats::FromValues(values, meta.categories.size(),
                                            categorical_alpha);
  }
  return GaussianLeafStats::FromValues(values);
}

void RemoveValue(LeafStats& stats, double value) {
  std::visit([value](auto& s) { s.Remove(value); }, stats);
}

double LeafLogDensity(const LeafStats& stats, double value) {
  if (const auto* g = std::get_if<GaussianLeafStats>(&stats)) {
    const double sigma = std::max(std::sqrt(g->variance()), kSigmaMin);
    const double z = (value - g->mean()) / sigma;
    return -0.5 * z * z - std::log(sigma) -
           0.5 * std::log(2.0 * std::numbers::pi);
  }
  const auto& c = std::get<CategoricalLeafStats>(stats);
  const double p = c.probability(static_cast<std::size_t>(value));
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

std::uint64_t LeafCount(const LeafStats& stats) {
  return std::visit([](const auto& s) { return s.n; }, stats);
}

}  // namespace unlearnspn
