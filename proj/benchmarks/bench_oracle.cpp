// Copyright 2026 The deepsdp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "deepsdp/oracle.hpp"

using namespace deepsdp;

// Enumeration cost grows as 2^N; each cell is one small conic solve.
static void BM_ExactMinimizeBox(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto net = bench::random_single_layer(n, 9);
  const Rectangle box{Vector::Zero(n), Vector::Ones(n)};
  for (auto _ : state) benchmark::DoNotOptimize(exact_minimize(net, box, bench::unit_first(n)).opt_value);
  state.counters["patterns"] = static_cast<double>(1 << n);
}
BENCHMARK(BM_ExactMinimizeBox)->ArgNames({"n"})->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

static void BM_ExactMinimizeBall(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto net = bench::random_single_layer(n, 9);
  const Ellipsoid ball{Vector::Zero(n), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(exact_minimize(net, ball, bench::unit_first(n)).opt_value);
}
BENCHMARK(BM_ExactMinimizeBall)->ArgNames({"n"})->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

static void BM_SampleBound(benchmark::State& state) {
  const auto samples = static_cast<int>(state.range(0));
  const auto net = bench::random_single_layer(4, 9);
  const Ellipsoid ball{Vector::Zero(4), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(sample_bound(net, ball, bench::unit_first(4), samples, 0));
  state.SetItemsProcessed(state.iterations() * samples);
}
BENCHMARK(BM_SampleBound)->ArgNames({"samples"})->RangeMultiplier(10)->Range(100, 100000);

BENCHMARK_MAIN();
