// Copyright 2026 The linfsolve Authors
//
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


// Serial reference against the OpenMP path for the per-cell kernels, the
// Hessian assembly and the minimality trials. Arguments: cell count, then
// 0 for serial and 1 for parallel.

#include <random>

#include <benchmark/benchmark.h>

#include "linf/analysis.h"
#include "linf/functionals.h"
#include "linf/kernels.h"
#include "linf/lagrangian.h"

namespace {

using namespace linf;

LagrangianModel CurvedModel() {
  Mat A(2, 2);
  A << 0.1, -0.3, 0.2, 0.05;
  PowerOptions opt;
  opt.exponent = 2.5;
  opt.coefficient = 0.7;
  opt.drift = std::make_shared<VectorField>(
      AffineField(A, Vec::Constant(2, 0.2), Vec::Constant(2, -0.3)));
  return BuiltinPower(2, opt);
}

GridFunction Sample(int n_cells) {
  const Grid g = BuildGrid({0, 1}, n_cells);
  GridFunction u(g, 2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  for (int i = 0; i <= n_cells; ++i) {
    const double x = g.node(i);
    u.node(i) << std::sin(3 * x) + d(rng), x * x + d(rng);
  }
  return u;
}

Exec ExecArg(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::kSerial : Exec::kParallel;
}

void BM_CellLagrangian(benchmark::State& state) {
  const LagrangianModel model = CurvedModel();
  const GridFunction u = Sample(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvalCellLagrangian(u, model, ExecArg(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EmGradient(benchmark::State& state) {
  const LagrangianModel model = CurvedModel();
  const GridFunction u = Sample(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(EmGradient(u, model, 64, ExecArg(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AssembleHessian(benchmark::State& state) {
  const LagrangianModel model = CurvedModel();
  const GridFunction u = Sample(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(AssembleHessian(u, model, 64, ExecArg(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MinimalityTrials(benchmark::State& state) {
  const LagrangianModel model = CurvedModel();
  const GridFunction u = Sample(static_cast<int>(state.range(0)));
  MinimalityOptions opt;
  opt.trials = 32;
  opt.seed = 5;
  opt.exec = ExecArg(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(VerifyAbsoluteMinimiser(u, model, opt));
  }
}

void KernelArgs(benchmark::internal::Benchmark* b) {
  for (int n : {256, 4096, 65536}) {
    for (int p : {0, 1}) b->Args({n, p});
  }
}

BENCHMARK(BM_CellLagrangian)->Apply(KernelArgs);
BENCHMARK(BM_EmGradient)->Apply(KernelArgs);
BENCHMARK(BM_AssembleHessian)->Apply(KernelArgs);
BENCHMARK(BM_MinimalityTrials)->Args({200, 0})->Args({200, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
