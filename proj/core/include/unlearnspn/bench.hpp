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
#include <memory>
#include <string>
#include <vector>

#include "unlearnspn/config.hpp"
#include "unlearnspn/dataset.hpp"

namespace unlearnspn {

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
};

Summary Summarize(const std::vector<double>& values);

struct HostInfo {
  std::string hostname;
  unsigned hardware_threads = 0;
  std::string compiler;
  std::string build;
  std::string timestamp;  // UTC, ISO 8601
};

HostInfo CurrentHost();

struct BenchmarkOptions {
  std::size_t sample = 1000;  // rows drawn for the initial model
  std::size_t removals = 100;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;     // sampling and removal schedules
  LearnConfig config;
};

struct BenchmarkRepeat {
  std::uint64_t seed = 0;
  std::vector<RowId> schedule;  // row ids within the sample, in removal order
  double unlearn_seconds = 0.0;  // sum over the removals
  double retrain_seconds = 0.0;  // sum over retraining on every prefix
  double initial_train_seconds = 0.0;
  bool final_models_equal = false;
};

struct BenchmarkReport {
  BenchmarkOptions options;
  std::size_t dataset_rows = 0;
  std::size_t dataset_vars = 0;
  std::vector<BenchmarkRepeat> repeats;
  Summary unlearn;
  Summary retrain;
  Summary initial_train;
  HostInfo host;

  // Relative saving of unlearning over retraining, 1 - unlearn / retrain.
  double improvement() const;
  std::string Table() const;
  std::string JsonLines() const;
};

// Train on a random sample, then remove `removals` random rows one by one,
// timing the cumulative unlearning against retraining on each prefix.
// Throws Error(kUsage) when the dataset is smaller than the sample.
BenchmarkReport RunBenchmark(const Dataset& dataset, const BenchmarkOptions& options);

struct OverheadOptions {
  std::size_t repeats = 10;
  LearnConfig config;
};

struct OverheadReport {
  OverheadOptions options;
  std::vector<double> plain_seconds;
  std::vector<double> recording_seconds;
  Summary plain;
  Summary recording;
  bool identical_structure = false;
  std::string structure_detail;
  HostInfo host;

  double ratio() const { return plain.mean > 0 ? recording.mean / plain.mean : 0.0; }
  std::string Table() const;
  std::string JsonLines() const;
};

// Times the state-recording learner against the plain learner on the same
// data and seed.
OverheadReport RunTrainOverhead(const Dataset& dataset, const OverheadOptions& options);

// Mixed synthetic table with cluster and independence structure.
std::shared_ptr<const Dataset> MakeBenchmarkDataset(std::size_t rows, std::size_t vars,
                                                    std::uint64_t seed);

}  // namespace unlearnspn
