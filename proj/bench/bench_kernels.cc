// Copyright 2026 The backdoor-mip Authors
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

// Serial reference kernels against the OpenMP entry points, plus the batched
// forward/backward pass used by training.

#include <vector>

#include "backdoor_mip/kernels.h"
#include "backdoor_mip/model.h"
#include "backdoor_mip/random.h"
#include "backdoor_mip/train.h"
#include "benchmark/benchmark.h"
#include "test_graphs.h"

namespace backdoor_mip {
namespace {

Matrix RandomMatrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.Normal();
  }
  return m;
}

template <auto kKernel>
void BM_Affine(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  const Matrix x = RandomMatrix(n, 64, rng);
  const Matrix w = RandomMatrix(64, 64, rng);
  const Matrix b = RandomMatrix(1, 64, rng);
  Matrix y;
  for (auto _ : state) {
    kKernel(x, w, &b, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * n * 64 * 64);
}
BENCHMARK(BM_Affine<kernels::reference::Affine>)->Name("Affine/serial")->Range(64, 4096);
BENCHMARK(BM_Affine<kernels::Affine>)->Name("Affine/openmp")->Range(64, 4096);

template <auto kKernel>
void BM_MatMulTransA(benchmark::State& state) {
  Rng rng(2);
  const int n = static_cast<int>(state.range(0));
  const Matrix a = RandomMatrix(n, 64, rng);
  const Matrix b = RandomMatrix(n, 64, rng);
  Matrix c(64, 64);
  for (auto _ : state) {
    kKernel(a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * n * 64 * 64);
}
BENCHMARK(BM_MatMulTransA<kernels::reference::AddMatMulTransA>)
    ->Name("MatMulTransA/serial")
    ->Range(64, 4096);
BENCHMARK(BM_MatMulTransA<kernels::AddMatMulTransA>)->Name("MatMulTransA/openmp")->Range(64, 4096);

void BM_BatchGradient(benchmark::State& state) {
  Rng rng(3);
  std::vector<PreparedGraph> graphs;
  for (int g = 0; g < 32; ++g) {
    graphs.push_back(Prepare(testing_util::RandomGraph(rng, 45, 190, false)));
  }
  std::vector<const PreparedGraph*> batch;
  LossSpec loss;
  for (int g = 0; g < 32; ++g) {
    batch.push_back(&graphs[g]);
    if (g > 0) loss.pairs.push_back({g - 1, g, g % 2 == 0 ? 1 : -1, 0});
  }
  const ModelParams params = InitParams(Hyperparams{}, 4);
  const Execution execution = state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
  for (auto _ : state) {
    auto result = ComputeBatchGradient(params, batch, loss, execution);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_BatchGradient)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace backdoor_mip

BENCHMARK_MAIN();
