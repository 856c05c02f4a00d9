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

#include "unlearnspn/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "unlearnspn/error.hpp"
#include "unlearnspn/learn.hpp"
#include "unlearnspn/random.hpp"
#include "unlearnspn/spn.hpp"
#include "unlearnspn/unlearn.hpp"

namespace unlearnspn {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// `count` distinct values of [0, n) in draw order.
std::vector<RowId> Draw(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<RowId> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<RowId>(i);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.Below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

nlohmann::json HostJson(const HostInfo& host) {
  return {{"hostname", host.hostname},
          {"hardware_threads", host.hardware_threads},
          {"compiler", host.compiler},
          {"build", host.build},
          {"timestamp", host.timestamp}};
}

nlohmann::json SummaryJson(const Summary& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}};
}

std::string Cell(const Summary& s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << s.mean << " ± " << s.stddev;
  return out.str();
}

}  // namespace

Summary Summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  return s;
}

HostInfo CurrentHost() {
  HostInfo host;
  char name[256] = {};
  if (gethostname(name, sizeof(name) - 1) == 0) host.hostname = name;
  host.hardware_threads = std::thread::hardware_concurrency();
#if defined(__clang__)
  host.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  host.compiler = "gcc " __VERSION__;
#else
  host.compiler = "unknown";
#endif
#ifdef NDEBUG
  host.build = "release";
#else
  host.build = "debug";
#endif
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  host.timestamp = stamp;
  return host;
}

double BenchmarkReport::improvement() const {
  return retrain.mean > 0 ? 1.0 - unlearn.mean / retrain.mean : 0.0;
}

std::string BenchmarkReport::Table() const {
  std::ostringstream out;
  out << "rows " << dataset_rows << ", variables " << dataset_vars << ", sample "
      << options.sample << ", removals " << options.removals << ", repeats "
      << repeats.size() << ", seed " << options.seed << "\n";
  out << std::left << std::setw(12) << "repeat" << std::setw(16) << "unlearning [s]"
      << std::setw(16) << "retraining [s]" << "equal\n";
  for (std::size_t r = 0; r < repeats.size(); ++r) {
    out << std::left << std::setw(12) << r << std::setw(16) << std::fixed
        << std::setprecision(3) << repeats[r].unlearn_seconds << std::setw(16)
        << repeats[r].retrain_seconds << (repeats[r].final_models_equal ? "yes" : "no")
        << "\n";
  }
  out << "unlearning [s]: " << Cell(unlearn) << "\n";
  out << "retraining [s]: " << Cell(retrain) << "\n";
  out << "improvement: " << std::setprecision(1) << 100.0 * improvement() << "%\n";
  return out.str();
}

std::string BenchmarkReport::JsonLines() const {
  std::ostringstream out;
  for (std::size_t r = 0; r < repeats.size(); ++r) {
    const BenchmarkRepeat& rep = repeats[r];
    nlohmann::json line = {{"record", "repeat"},
                           {"repeat", r},
                           {"seed", rep.seed},
                           {"schedule", rep.schedule},
                           {"initial_train_seconds", rep.initial_train_seconds},
                           {"unlearn_seconds", rep.unlearn_seconds},
                           {"retrain_seconds", rep.retrain_seconds},
                           {"final_models_equal", rep.final_models_equal}};
    out << line.dump() << "\n";
  }
  nlohmann::json summary = {{"record", "summary"},
                            {"dataset_rows", dataset_rows},
                            {"dataset_vars", dataset_vars},
                            {"sample", options.sample},
                            {"removals", options.removals},
                            {"repeats", options.repeats},
                            {"seed", options.seed},
                            {"master_seed", options.config.master_seed},
                            {"threshold", options.config.min_instances},
                            {"unlearn_seconds", SummaryJson(unlearn)},
                            {"retrain_seconds", SummaryJson(retrain)},
                            {"initial_train_seconds", SummaryJson(initial_train)},
                            {"improvement", improvement()},
                            {"host", HostJson(host)}};
  out << summary.dump() << "\n";
  return out.str();
}

BenchmarkReport RunBenchmark(const Dataset& dataset, const BenchmarkOptions& options) {
  options.config.Validate();
  if (options.sample < 2 || dataset.num_rows() < options.sample) {
    throw Error(ErrorCode::kUsage, "benchmark needs at least " +
                                       std::to_string(options.sample) +
                                       " rows, dataset has " +
                                       std::to_string(dataset.num_rows()));
  }
  if (options.removals < 1 || options.removals >= options.sample) {
    throw Error(ErrorCode::kUsage, "removals must lie in [1, sample)");
  }
  if (options.repeats < 1) throw Error(ErrorCode::kUsage, "repeats must be at least 1");

  BenchmarkReport report;
  report.options = options;
  report.dataset_rows = dataset.num_rows();
  report.dataset_vars = dataset.num_vars();
  report.host = CurrentHost();
  const double tolerance =
      options.config.removal_mode == RemovalMode::kExactReplay ? 0.0 : 1e-9;

  std::vector<double> unlearn, retrain, initial;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    BenchmarkRepeat rep;
    rep.seed = DeriveChildSeed(options.seed, r);
    Rng rng(rep.seed);
    std::vector<RowId> rows = Draw(rng, dataset.num_rows(), options.sample);
    std::sort(rows.begin(), rows.end());
    auto sample = std::make_shared<const Dataset>(dataset.Subset(rows));
    rep.schedule = Draw(rng, options.sample, options.removals);

    auto start = Clock::now();
    Spn spn = LearnSpn(sample, options.config);
    rep.initial_train_seconds = SecondsSince(start);

    start = Clock::now();
    for (RowId row : rep.schedule) UnlearnSpn(spn, row);
    rep.unlearn_seconds = SecondsSince(start);

    std::vector<RowId> removed;
    Spn last;
    start = Clock::now();
    for (RowId row : rep.schedule) {
      removed.insert(std::upper_bound(removed.begin(), removed.end(), row), row);
      last = LearnSpn(sample, options.config, removed);
    }
    rep.retrain_seconds = SecondsSince(start);
    rep.final_models_equal = static_cast<bool>(StructuralEqual(spn, last, tolerance));

    unlearn.push_back(rep.unlearn_seconds);
    retrain.push_back(rep.retrain_seconds);
    initial.push_back(rep.initial_train_seconds);
    report.repeats.push_back(std::move(rep));
  }
  report.unlearn = Summarize(unlearn);
  report.retrain = Summarize(retrain);
  report.initial_train = Summarize(initial);
  return report;
}

std::string OverheadReport::Table() const {
  std::ostringstream out;
  out << "repeats " << plain_seconds.size() << "\n";
  out << "original learner [s]: " << Cell(plain) << "\n";
  out << "recording learner [s]: " << Cell(recording) << "\n";
  out << "ratio: " << std::fixed << std::setprecision(2) << ratio() << "\n";
  out << "identical structure: " << (identical_structure ? "yes" : "no");
  if (!identical_structure) out << " (" << structure_detail << ")";
  out << "\n";
  return out.str();
}

std::string OverheadReport::JsonLines() const {
  std::ostringstream out;
  for (std::size_t r = 0; r < plain_seconds.size(); ++r) {
    out << nlohmann::json{{"record", "repeat"},
                          {"repeat", r},
                          {"plain_seconds", plain_seconds[r]},
                          {"recording_seconds", recording_seconds[r]}}
               .dump()
        << "\n";
  }
  out << nlohmann::json{{"record", "summary"},
                        {"repeats", options.repeats},
                        {"master_seed", options.config.master_seed},
                        {"threshold", options.config.min_instances},
                        {"plain_seconds", SummaryJson(plain)},
                        {"recording_seconds", SummaryJson(recording)},
                        {"ratio", ratio()},
                        {"identical_structure", identical_structure},
                        {"host", HostJson(host)}}
             .dump()
      << "\n";
  return out.str();
}

OverheadReport RunTrainOverhead(const Dataset& dataset, const OverheadOptions& options) {
  options.config.Validate();
  if (options.repeats < 1) throw Error(ErrorCode::kUsage, "repeats must be at least 1");
  OverheadReport report;
  report.options = options;
  report.host = CurrentHost();
  auto shared = std::make_shared<const Dataset>(dataset);
  Spn recorded;
  PlainNode plain;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    // Alternate the order so neither learner always runs on a warm cache.
    for (int pass = 0; pass < 2; ++pass) {
      const bool plain_turn = (pass == 0) == (r % 2 == 0);
      const auto start = Clock::now();
      if (plain_turn) {
        plain = LearnPlain(dataset, options.config);
        report.plain_seconds.push_back(SecondsSince(start));
      } else {
        recorded = LearnSpn(shared, options.config);
        report.recording_seconds.push_back(SecondsSince(start));
      }
    }
  }
  report.plain = Summarize(report.plain_seconds);
  report.recording = Summarize(report.recording_seconds);
  const Comparison same = SameStructure(recorded.root, plain);
  report.identical_structure = same.equal;
  if (!same) report.structure_detail = same.path + ": " + same.detail;
  return report;
}

std::shared_ptr<const Dataset> MakeBenchmarkDataset(std::size_t rows, std::size_t vars,
                                                    std::uint64_t seed) {
  if (rows == 0 || vars == 0) throw Error(ErrorCode::kUsage, "empty benchmark dataset");
  Rng rng(seed);
  constexpr std::size_t kComponents = 3;
  std::vector<std::vector<double>> centers(kComponents, std::vector<double>(vars));
  for (auto& c : centers) {
    for (double& x : c) x = rng.Uniform(-5.0, 5.0);
  }
  std::vector<std::size_t> component(rows);
  std::vector<double> latent(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    component[i] = rng.Below(kComponents);
    latent[i] = rng.Normal();
  }
  std::vector<Variable> schema;
  std::vector<std::vector<double>> columns(vars, std::vector<double>(rows));
  for (std::size_t j = 0; j < vars; ++j) {
    const bool categorical = j % 4 == 3;
    const bool clustered = j < (vars + 1) / 2;
    if (categorical) {
      schema.push_back({"c" + std::to_string(j), VarKind::kCategorical, {"a", "b", "c"}, 0, 0});
    } else {
      schema.push_back({"x" + std::to_string(j), VarKind::kGaussian, {}, -12.0, 12.0});
    }
    for (std::size_t i = 0; i < rows; ++i) {
      double v = clustered ? centers[component[i]][j] + 0.8 * rng.Normal()
                           : 1.5 * latent[i] + 0.7 * rng.Normal();
      if (categorical) {
        const double u = clustered ? static_cast<double>(component[i]) : (v > 0 ? 2.0 : 0.0);
        columns[j][i] = rng.Uniform() < 0.85 ? u : static_cast<double>(rng.Below(3));
      } else {
        columns[j][i] = std::clamp(v, -12.0, 12.0);
      }
    }
  }
  return std::make_shared<const Dataset>(Schema(std::move(schema)), std::move(columns));
}

}  // namespace unlearnspn
