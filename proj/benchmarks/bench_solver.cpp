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
#include "deepsdp/conic_solver.hpp"
#include "deepsdp/formulation.hpp"
#include "deepsdp/linalg.hpp"

using namespace deepsdp;

static void BM_EigSym(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (auto& v : a.reshaped()) v = g(rng);
  const SymMat s(0.5 * (a + a.transpose()));
  for (auto _ : state) benchmark::DoNotOptimize(linalg::eig_sym(s));
}
BENCHMARK(BM_EigSym)->ArgNames({"n"})->RangeMultiplier(2)->Range(4, 32);

static void BM_SolveDual(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto net = bench::random_single_layer(n, 3);
  const auto problem = build_deepsdp_dual(net, Ellipsoid{Vector::Zero(n), 1.0}, bench::unit_first(n));
  int iterations = 0;
  for (auto _ : state) {
    const auto sol = conic::solve(problem);
    iterations = sol.iterations;
    benchmark::DoNotOptimize(sol.primal_obj);
  }
  state.counters["ipm_iterations"] = iterations;
}
BENCHMARK(BM_SolveDual)->ArgNames({"n"})->DenseRange(2, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_SolvePrimal(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto net = bench::random_single_layer(n, 3);
  const Rectangle box{Vector::Zero(n), Vector::Ones(n)};
  const auto problem = build_primal_relaxation(net, box, bench::unit_first(n));
  for (auto _ : state) benchmark::DoNotOptimize(conic::solve(problem).primal_obj);
}
BENCHMARK(BM_SolvePrimal)->ArgNames({"n"})->DenseRange(2, 10, 2)->Unit(benchmark::kMillisecond);
