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

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "unlearnspn/config.hpp"
#include "unlearnspn/dataset.hpp"
#include "unlearnspn/spn.hpp"
#include "unlearnspn/unlearn.hpp"

namespace unlearnspn {

// Synthetic datasets aimed at particular decision branches.
enum class Generator : std::uint8_t {
  kMixed = 0,             // gaussian and categorical columns, some dependent
  kConstantColumns = 1,   // constant and almost-constant columns
  kBlobs = 2,             // separated clusters with dependent variables
  kIndependentBlocks = 3, // dependent blocks, independent across blocks
  kNearThreshold = 4,     // row count just above the learner threshold
  kSingletonCluster = 5,  // a tight blob plus one far outlier
  kLowCardinality = 6,    // few distinct values per column
  kBoundary = 7,          // searched until a single removal flips the decision
};
inline constexpr std::size_t kNumGenerators = 8;

std::string_view GeneratorName(Generator generator);

struct SyntheticSpec {
  Generator generator = Generator::kMixed;
  std::size_t rows = 50;
  std::size_t vars = 3;
  std::uint64_t seed = 0;
  // Learner settings the generator may tune for (threshold, seed).
  LearnConfig config;
};

// Equal inputs give equal datasets.
std::shared_ptr<const Dataset> Generate(const SyntheticSpec& spec);

// Picks a generator, shape and learner settings for trial `index`: rows in
// [min_rows, max_rows], variables in [1, max_vars].
SyntheticSpec SampleSpec(std::uint64_t seed, std::size_t index, std::size_t min_rows,
                         std::size_t max_rows, std::size_t max_vars,
                         const LearnConfig& base);

// Stable 64-bit digest of a dataset's schema and values, as hex.
std::string Fingerprint(const Dataset& dataset);

// Learner run on the survivors with the unchanged master seed.
Spn RetrainOracle(std::shared_ptr<const Dataset> dataset, std::vector<RowId> removed,
                  const LearnConfig& config);

struct CrOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  RemovalMode mode = RemovalMode::kExactReplay;
  std::size_t min_rows = 10;
  std::size_t max_rows = 200;
  std::size_t max_vars = 8;
  std::size_t removals = 1;  // rows removed one after another per trial
  LearnConfig base;          // splitter settings; threshold and seed vary
  UnlearnOptions unlearn;
  std::string failure_dir;   // reproduction bundles go here when non-empty
  std::size_t threads = 0;   // 0: hardware concurrency
};

struct CrFailure {
  std::size_t trial = 0;
  std::string generator;
  std::string fingerprint;
  std::uint64_t dataset_seed = 0;
  std::size_t rows = 0;
  std::size_t vars = 0;
  std::uint64_t master_seed = 0;
  std::uint32_t threshold = 0;
  std::vector<RowId> removed;
  std::string path;
  std::string detail;
};

struct CrReport {
  RemovalMode mode = RemovalMode::kExactReplay;
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::vector<CrFailure> failures;
  std::size_t validated_models = 0;
  std::array<std::size_t, 7> actions{};         // by UnlearnAction
  std::array<std::size_t, kNumGenerators> by_generator{};
};

// Exact equality in exact-replay mode; relative 1e-9 on gaussian parameters
// in incremental mode.
double ToleranceFor(RemovalMode mode);

// Throws Error(kUsage) when trials is 0.
CrReport CheckZeroCr(const CrOptions& options);

struct RevisionOptions {
  std::uint64_t seed = 0;
  std::size_t seeds = 20;
  std::size_t max_rows = 25;
  std::size_t max_vars = 4;
  LearnConfig base;
  // Also unlearn every row at the root and compare against the oracle.
  bool check_unlearning = true;
  std::size_t threads = 0;
};

struct RevisionMismatch {
  std::string generator;
  std::uint64_t dataset_seed = 0;
  std::uint64_t master_seed = 0;
  std::uint32_t threshold = 0;
  std::string path;
  RowId row = 0;
  Op op_old = Op::kCreateLeaf;
  Op predicted = Op::kCreateLeaf;
  Op actual = Op::kCreateLeaf;
  std::string detail;
};

using TransitionCounts = std::array<std::array<std::size_t, kNumOps>, kNumOps>;

struct RevisionReport {
  std::size_t datasets = 0;
  std::size_t checks = 0;           // (node, row) pairs
  std::size_t unlearn_checks = 0;   // root removals compared with the oracle
  std::size_t validated_models = 0;
  std::vector<RevisionMismatch> mismatches;
  std::vector<CrFailure> unlearn_failures;
  TransitionCounts transitions{};   // [old][new]

  // Every transition the revision function can produce was seen.
  std::vector<std::pair<Op, Op>> MissingTransitions() const;
};

// The fifteen reachable (old, new) operation pairs.
std::vector<std::pair<Op, Op>> PossibleTransitions();

RevisionReport CheckRevision(const RevisionOptions& options);

// Writes dataset, schema and trial parameters under `dir`.
void WriteReproBundle(const std::string& dir, const Dataset& dataset,
                      const CrFailure& failure);

}  // namespace unlearnspn
