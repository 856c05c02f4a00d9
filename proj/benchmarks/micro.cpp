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

#include <benchmark/benchmark.h>

#include "unlearnspn/bench.hpp"
#include "unlearnspn/clustering.hpp"
#include "unlearnspn/independence.hpp"
#include "unlearnspn/learn.hpp"
#include "unlearnspn/unlearn.hpp"

namespace unlearnspn {
namespace {

void BM_Train(benchmark::State& state) {
  const auto data = MakeBenchmarkDataset(static_cast<std::size_t>(state.range(0)), 8, 1);
  LearnConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(LearnSpn(data, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Train)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TrainPlain(benchmark::State& state) {
  const auto data = MakeBenchmarkDataset(static_cast<std::size_t>(state.range(0)), 8, 1);
  LearnConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(LearnPlain(*data, config));
}
BENCHMARK(BM_TrainPlain)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_UnlearnOne(benchmark::State& state) {
  const auto data = MakeBenchmarkDataset(static_cast<std::size_t>(state.range(0)), 8, 1);
  LearnConfig config;
  const Spn trained = LearnSpn(data, config);
  RowId row = 0;
  for (auto _ : state) {
    state.PauseTiming();
    Spn spn = trained;
    state.ResumeTiming();
    benchmark::DoNotOptimize(UnlearnSpn(spn, row));
    row = (row + 37) % static_cast<RowId>(state.range(0));
  }
}
BENCHMARK(BM_UnlearnOne)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitClusters(benchmark::State& state) {
  const auto data = MakeBenchmarkDataset(static_cast<std::size_t>(state.range(0)), 8, 2);
  const DataView view = DataView::Full(*data);
  for (auto _ : state) benchmark::DoNotOptimize(FitClusters(view, 5, {}));
}
BENCHMARK(BM_FitClusters)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_RemoveFromClusters(benchmark::State& state) {
  const auto data = MakeBenchmarkDataset(1000, 8, 2);
  ClusteringConfig config;
  config.strategy = static_cast<ClusteringStrategy>(state.range(0));
  const ClusteringModel model = FitClusters(DataView::Full(*data), 5, config);
  RowId row = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RemoveFromClusters(model, *data, row));
    row = (row + 37) % 1000;
  }
}
BENCHMARK(BM_RemoveFromClusters)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_FitIndependence(benchmark::State& state) {
  const auto data = MakeBenchmarkDataset(static_cast<std::size_t>(state.range(0)), 8, 3);
  const DataView view = DataView::Full(*data);
  for (auto _ : state) benchmark::DoNotOptimize(FitIndependence(view, 5, {}));
}
BENCHMARK(BM_FitIndependence)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace unlearnspn

BENCHMARK_MAIN();
