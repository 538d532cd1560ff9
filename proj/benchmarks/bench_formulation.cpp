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
#include "deepsdp/formulation.hpp"

using namespace deepsdp;

static void BM_BuildDual(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const bool cuts = state.range(1) != 0;
  const auto net = bench::random_single_layer(n, 5);
  const Rectangle box{Vector::Zero(n), Vector::Ones(n)};
  for (auto _ : state)
    benchmark::DoNotOptimize(build_deepsdp_dual(net, box, bench::unit_first(n), {cuts}));
}
BENCHMARK(BM_BuildDual)->ArgNames({"n", "cuts"})->ArgsProduct({{2, 4, 8, 16}, {0, 1}});

static void BM_BuildPrimal(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto net = bench::random_single_layer(n, 5);
  const Ellipsoid ball{Vector::Zero(n), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(build_primal_relaxation(net, ball, bench::unit_first(n)));
}
BENCHMARK(BM_BuildPrimal)->ArgNames({"n"})->RangeMultiplier(2)->Range(2, 16);
