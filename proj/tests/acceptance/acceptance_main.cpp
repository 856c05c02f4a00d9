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

// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.
// Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "unlearnspn/bench.hpp"
#include "unlearnspn/clustering.hpp"
#include "unlearnspn/independence.hpp"
#include "unlearnspn/leaves.hpp"
#include "unlearnspn/random.hpp"
#include "unlearnspn/serialize.hpp"
#include "unlearnspn/verify.hpp"

namespace unlearnspn {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Seconds(double s) {
  std::ostringstream out;
  out.precision(1);
  out << std::fixed << s << " s";
  return out.str();
}

// Shared between criteria 1, 2 and 7.
struct Runs {
  bool cr_done = false;
  CrReport exact;
  CrReport incremental;
  bool rev_done = false;
  RevisionReport revision;
};

void EnsureCr(Runs& runs) {
  if (runs.cr_done) return;
  CrOptions options;
  options.trials = 1000;
  options.mode = RemovalMode::kExactReplay;
  runs.exact = CheckZeroCr(options);
  options.mode = RemovalMode::kIncremental;
  runs.incremental = CheckZeroCr(options);
  runs.cr_done = true;
}

void EnsureRevision(Runs& runs) {
  if (runs.rev_done) return;
  RevisionOptions options;
  options.seeds = 20;
  options.max_rows = 25;
  options.max_vars = 4;
  runs.revision = CheckRevision(options);
  runs.rev_done = true;
}

std::string DescribeCr(const char* name, const CrReport& r) {
  std::ostringstream out;
  out << name << " " << r.passes << "/" << r.trials << " at tolerance " << r.tolerance;
  if (!r.failures.empty()) {
    const CrFailure& f = r.failures.front();
    out << " (first failure: trial " << f.trial << " " << f.generator << " at " << f.path
        << ": " << f.detail << ")";
  }
  return out.str();
}

Outcome ZeroCr(Runs& runs) {
  const auto start = Clock::now();
  EnsureCr(runs);
  const double elapsed = Since(start);
  const bool ok = runs.exact.failures.empty() && runs.incremental.failures.empty() &&
                  runs.exact.trials >= 1000 && runs.incremental.trials >= 1000 &&
                  elapsed <= 300.0;
  return {ok, DescribeCr("exact-replay", runs.exact) + "; " +
                  DescribeCr("incremental", runs.incremental) + "; " + Seconds(elapsed)};
}

Outcome RevisionSoundness(Runs& runs) {
  const auto start = Clock::now();
  EnsureRevision(runs);
  const double elapsed = Since(start);
  const RevisionReport& r = runs.revision;
  const auto missing = r.MissingTransitions();
  std::ostringstream detail;
  detail << r.datasets << " datasets, " << r.checks << " checks, " << r.mismatches.size()
         << " mismatches, " << r.unlearn_checks << " unlearning checks, "
         << r.unlearn_failures.size() << " unlearning failures, "
         << PossibleTransitions().size() - missing.size() << "/" << PossibleTransitions().size()
         << " transitions seen";
  for (const auto& [from, to] : missing) detail << " missing " << OpName(from) << "->" << OpName(to);
  if (!r.mismatches.empty()) {
    const RevisionMismatch& m = r.mismatches.front();
    detail << " (first mismatch: " << m.generator << " at " << m.path << " row " << m.row
           << ", predicted " << OpName(m.predicted) << ", actual " << OpName(m.actual) << ")";
  }
  detail << "; " << Seconds(elapsed);
  const bool ok = r.mismatches.empty() && r.unlearn_failures.empty() && missing.empty() &&
                  elapsed <= 120.0;
  return {ok, detail.str()};
}

Outcome SplitterContracts() {
  const auto start = Clock::now();
  std::size_t cluster_checks = 0, cluster_bad = 0, cluster_changed = 0;
  std::size_t indep_checks = 0, indep_bad = 0, indep_changed = 0;
  std::string first;
  constexpr std::size_t kDatasets = 240;
  for (std::size_t i = 0; i < kDatasets; ++i) {
    const SyntheticSpec spec = SampleSpec(0xC0417AC7, i, 3, 30, 4, {});
    const auto data = Generate(spec);
    const DataView view = DataView::Full(*data);
    const std::uint64_t seed = DeriveChildSeed(spec.config.master_seed, i);
    for (ClusteringStrategy strategy :
         {ClusteringStrategy::kQuantized, ClusteringStrategy::kReplay}) {
      ClusteringConfig config;
      config.strategy = strategy;
      config.k = 2 + static_cast<std::uint32_t>(i % 2);
      const ClusteringModel model = FitClusters(view, seed, config);
      for (RowId row : view.rows()) {
        const ClusterRemoval removal = RemoveFromClusters(model, *data, row);
        const ClusteringModel refit = FitClusters(view.WithoutRow(row), seed, config);
        const bool agree = removal.changed == !SamePartition(model, refit) &&
                           removal.model.assignment == refit.assignment;
        ++cluster_checks;
        cluster_changed += removal.changed;
        if (!agree && cluster_bad++ == 0) {
          first = "clustering dataset " + std::to_string(i) + " row " + std::to_string(row);
        }
      }
    }
    if (view.scope().size() < 2) continue;
    const IndependenceModel model = FitIndependence(view, seed, {});
    for (RowId row : view.rows()) {
      const DataView survivors = view.WithoutRow(row);
      const IndependenceRemoval removal = RemoveFromIndependence(model, survivors);
      const IndependenceModel refit = FitIndependence(survivors, seed, {});
      const bool agree = removal.changed == (refit.components != model.components) &&
                         removal.model.components == refit.components;
      ++indep_checks;
      indep_changed += removal.changed;
      if (!agree && indep_bad++ == 0) {
        first = "independence dataset " + std::to_string(i) + " row " + std::to_string(row);
      }
    }
  }
  const double elapsed = Since(start);
  std::ostringstream detail;
  detail << "clustering " << cluster_checks - cluster_bad << "/" << cluster_checks
         << " agree (" << cluster_changed << " changed), independence "
         << indep_checks - indep_bad << "/" << indep_checks << " agree (" << indep_changed
         << " changed)";
  if (!first.empty()) detail << ", first disagreement " << first;
  detail << "; " << Seconds(elapsed);
  return {cluster_bad == 0 && indep_bad == 0 && elapsed <= 60.0, detail.str()};
}

Outcome LeafStatistics() {
  const auto start = Clock::now();
  constexpr std::size_t kSequences = 10000;
  const Schema schema({{"g", VarKind::kGaussian, {}, -1e6, 1e6},
                       {"c", VarKind::kCategorical, {"a", "b", "c", "d", "e"}, 0, 0}});
  Rng rng(0x1EAF);
  std::size_t steps = 0, bad = 0;
  double worst = 0.0;
  std::string first;
  for (std::size_t s = 0; s < kSequences; ++s) {
    const std::size_t n = 2 + rng.Below(200);
    const double centre = std::ldexp(rng.Uniform(-1, 1), static_cast<int>(rng.Below(20)));
    const double spread = std::ldexp(1.0, static_cast<int>(rng.Below(16)) - 8);
    const std::size_t levels = 1 + rng.Below(6);
    std::vector<std::vector<double>> rows(n);
    for (auto& row : rows) {
      // Some columns take only a few distinct values so constant tails occur.
      const double g = s % 3 == 0 ? centre + spread * static_cast<double>(rng.Below(levels))
                                  : centre + spread * rng.Normal();
      row = {g, static_cast<double>(rng.Below(1 + s % 5))};
    }
    const Dataset data = Dataset::FromRows(schema, rows);
    DataView view = DataView::Full(data);
    LeafStats gauss = ComputeLeafStats(view, 0);
    LeafStats cat = ComputeLeafStats(view, 1);
    const std::size_t removals = rng.Below(n);  // leaves at least one row
    for (std::size_t m = 0; m < removals; ++m) {
      const RowId row = view.rows()[rng.Below(view.size())];
      RemoveValue(gauss, data.value(row, 0));
      RemoveValue(cat, data.value(row, 1));
      view = view.WithoutRow(row);
      const LeafStats scratch_g = ComputeLeafStats(view, 0);
      const LeafStats scratch_c = ComputeLeafStats(view, 1);
      const auto& g = std::get<GaussianLeafStats>(gauss);
      const auto& fresh = std::get<GaussianLeafStats>(scratch_g);
      const auto& c = std::get<CategoricalLeafStats>(cat);
      const auto& fresh_c = std::get<CategoricalLeafStats>(scratch_c);
      const bool ok = oracle::RelClose(g.mean(), fresh.mean(), 1e-9) &&
                      oracle::RelClose(g.variance(), fresh.variance(), 1e-9) &&
                      g.n == fresh.n && c.counts == fresh_c.counts && c.n == fresh_c.n;
      const double scale = std::max(std::abs(fresh.variance()), std::abs(g.variance()));
      if (scale > 0) worst = std::max(worst, std::abs(g.variance() - fresh.variance()) / scale);
      ++steps;
      if (!ok && bad++ == 0) {
        std::ostringstream where;
        where.precision(17);
        where << "sequence " << s << " step " << m << ": mean " << g.mean() << " vs "
              << fresh.mean() << ", variance " << g.variance() << " vs " << fresh.variance();
        first = where.str();
      }
    }
  }
  const double elapsed = Since(start);
  std::ostringstream detail;
  detail << kSequences << " sequences, " << steps << " removals, " << bad
         << " outside tolerance, worst relative variance error " << worst;
  if (!first.empty()) detail << ", first: " << first;
  detail << "; " << Seconds(elapsed);
  return {bad == 0 && elapsed <= 30.0, detail.str()};
}

Outcome BenchmarkDirection() {
  const auto start = Clock::now();
  const auto data = MakeBenchmarkDataset(1000, 8, 2026);
  BenchmarkOptions options;
  options.sample = 1000;
  options.removals = 100;
  options.repeats = 10;
  options.seed = 2026;
  const BenchmarkReport report = RunBenchmark(*data, options);
  bool equal = true;
  for (const BenchmarkRepeat& rep : report.repeats) equal = equal && rep.final_models_equal;
  const double elapsed = Since(start);
  std::ostringstream detail;
  detail.precision(3);
  detail << std::fixed << "unlearning " << report.unlearn.mean << " +- " << report.unlearn.stddev
         << " s, retraining " << report.retrain.mean << " +- " << report.retrain.stddev
         << " s, improvement " << 100.0 * report.improvement() << "%, final models "
         << (equal ? "equal" : "DIFFER") << "; " << Seconds(elapsed);
  const bool ok = report.unlearn.mean < report.retrain.mean && report.improvement() >= 0.05 &&
                  equal && elapsed <= 1800.0;
  return {ok, detail.str()};
}

Outcome TrainingOverhead() {
  const auto start = Clock::now();
  const auto data = MakeBenchmarkDataset(1000, 8, 2026);
  OverheadOptions options;
  options.repeats = 10;
  const OverheadReport report = RunTrainOverhead(*data, options);
  const double elapsed = Since(start);
  std::ostringstream detail;
  detail.precision(3);
  detail << std::fixed << "recording " << report.recording.mean << " s, plain "
         << report.plain.mean << " s, ratio " << report.ratio() << ", structure "
         << (report.identical_structure ? "identical" : "differs: " + report.structure_detail)
         << "; " << Seconds(elapsed);
  return {report.ratio() <= 3.0 && report.identical_structure && elapsed <= 300.0,
          detail.str()};
}

Outcome StructuralValidity(Runs& runs) {
  EnsureCr(runs);
  EnsureRevision(runs);
  // Every trial validates the trained, the unlearned and the retrained model.
  const std::size_t expected = 3 * (runs.exact.trials + runs.incremental.trials);
  const std::size_t got = runs.exact.validated_models + runs.incremental.validated_models;
  std::ostringstream detail;
  detail << got << "/" << expected << " models validated in the oracle runs, "
         << runs.revision.validated_models << " in the revision sweep";
  const bool ok = got == expected && runs.revision.validated_models > 0 &&
                  runs.revision.unlearn_failures.empty();
  return {ok, detail.str()};
}

Outcome Serialization() {
  const auto start = Clock::now();
  std::size_t identical = 0;
  std::string first;
  for (std::size_t i = 0; i < 100; ++i) {
    SyntheticSpec spec = SampleSpec(0x5E71A1, i, 10, 200, 8, {});
    spec.config.removal_mode = i % 2 ? RemovalMode::kIncremental : RemovalMode::kExactReplay;
    const auto data = Generate(spec);
    Spn spn = LearnSpn(data, spec.config);
    if (i % 3 == 0 && data->num_rows() > 3) UnlearnBatch(spn, {1, 2});
    const std::string bytes = SerializeModel(spn);
    const Spn back = DeserializeModel(bytes);
    const bool ok = SerializeModel(back) == bytes && back.root == spn.root &&
                    back.removed == spn.removed && *back.dataset == *spn.dataset &&
                    back.config == spn.config && StructuralEqual(spn, back, 0.0);
    if (ok) {
      ++identical;
    } else if (first.empty()) {
      first = "model " + std::to_string(i);
    }
  }
  const double elapsed = Since(start);
  std::string detail = std::to_string(identical) + "/100 round trips bit-identical";
  if (!first.empty()) detail += ", first difference in " + first;
  return {identical == 100 && elapsed <= 60.0, detail + "; " + Seconds(elapsed)};
}

}  // namespace
}  // namespace unlearnspn

int main(int argc, char** argv) {
  using namespace unlearnspn;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  Runs runs;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"zero-cr oracle equality", [&] { return ZeroCr(runs); }},
      {"revision soundness", [&] { return RevisionSoundness(runs); }},
      {"splitter removal contracts", SplitterContracts},
      {"leaf statistics", LeafStatistics},
      {"benchmark direction", BenchmarkDirection},
      {"training overhead", TrainingOverhead},
      {"structural validity", [&] { return StructuralValidity(runs); }},
      {"serialization round trip", Serialization},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(number)) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    failed += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << number << " "
              << criteria[i].first << ": " << outcome.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
