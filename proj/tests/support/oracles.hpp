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

// Independent reference implementations the unit and acceptance tests compare
// against. Nothing here shares code with the library beyond public types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <vector>

#include "unlearnspn/dataset.hpp"
#include "unlearnspn/leaves.hpp"

namespace unlearnspn::oracle {

// Two-pass mean and population variance.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Moments TwoPass(const std::vector<double>& values) {
  Moments m;
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  for (double v : values) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= static_cast<double>(values.size());
  return m;
}

inline std::vector<std::uint64_t> CountCodes(const std::vector<double>& codes,
                                             std::size_t categories) {
  std::vector<std::uint64_t> counts(categories, 0);
  for (double c : codes) ++counts[static_cast<std::size_t>(c)];
  return counts;
}

inline double GaussianLogDensity(double mean, double variance, double x) {
  const double sigma = std::max(std::sqrt(variance), kSigmaMin);
  const double z = (x - mean) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * 3.14159265358979323846);
}

// Relative closeness with no absolute floor beyond exact equality.
inline bool RelClose(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Connected components by repeated boolean matrix squaring of the reachability
// relation. Components are listed by smallest member, members ascending.
inline std::vector<std::vector<std::size_t>> Components(std::vector<bool> reach,
                                                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) reach[i * n + i] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[i * n + k] && reach[k * n + j]) reach[i * n + j] = true;
      }
    }
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> comp;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i * n + j] || reach[j * n + i]) {
        comp.push_back(j);
        seen[j] = true;
      }
    }
    out.push_back(comp);
  }
  return out;
}

// True when `assignment` is a fixed point of plain Lloyd for the given 1-D
// points: every point sits with its nearest centroid (lowest index on ties)
// and every non-empty centroid is within `slack` of its cluster mean.
inline bool IsLloydFixedPoint(const std::vector<double>& points,
                              const std::vector<double>& centroids,
                              const std::vector<std::uint32_t>& assignment,
                              double slack) {
  const std::size_t k = centroids.size();
  std::vector<double> sums(k, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (std::abs(points[i] - centroids[c]) < std::abs(points[i] - centroids[best])) {
        best = c;
      }
    }
    if (best != assignment[i]) return false;
    sums[best] += points[i];
    ++counts[best];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double mean = sums[c] / static_cast<double>(counts[c]);
    if (std::abs(mean - centroids[c]) > slack) return false;
  }
  return true;
}

inline Schema GaussianSchema(std::size_t vars, double lo = -10.0, double hi = 10.0) {
  std::vector<Variable> v;
  for (std::size_t i = 0; i < vars; ++i) {
    v.push_back({"g" + std::to_string(i), VarKind::kGaussian, {}, lo, hi});
  }
  return Schema(std::move(v));
}

inline std::shared_ptr<const Dataset> Rows(const Schema& schema,
                                           const std::vector<std::vector<double>>& rows) {
  return std::make_shared<const Dataset>(Dataset::FromRows(schema, rows));
}

}  // namespace unlearnspn::oracle
