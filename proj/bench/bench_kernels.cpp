/* Copyright 2026 The bnse Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Serial reference against the OpenMP path for the O(N^2) and O(NM) kernels.
// Run with OMP_NUM_THREADS set to the number of cores to compare.

#include <memory>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bnse/baselines.hpp"
#include "bnse/gp.hpp"
#include "bnse/spectrum.hpp"

namespace {

using bnse::Exec;

bnse::TimeSeries random_series(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = u(rng);
    y[i] = g(rng);
  }
  return bnse::TimeSeries::from_unsorted(std::move(t), std::move(y));
}

std::shared_ptr<const bnse::SMKernel> kernel() {
  return std::make_shared<bnse::SMKernel>(
      std::vector<bnse::SMComponent>{{1.0, 0.1, 0.3}, {0.5, 0.5, 0.05}});
}

Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::serial : Exec::parallel;
}

void BM_Gram(benchmark::State& state) {
  const auto d = random_series(static_cast<std::size_t>(state.range(0)));
  const auto k = kernel();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bnse::kernel_gram(*k, bnse::NoiseModel{0.1}, d.times(), 0.0,
                                               exec_of(state)));
  }
}

void BM_PosteriorGrid(benchmark::State& state) {
  const auto d = random_series(static_cast<std::size_t>(state.range(0)));
  auto gp = std::make_shared<const bnse::TrainedGP>(kernel(), bnse::NoiseModel{0.1}, d);
  const bnse::SpectrumPosterior post(gp, bnse::WindowConfig::automatic(d));
  const auto grid = bnse::linear_grid(0.0, 1.0, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(post.evaluate(grid, exec_of(state)));
}

void BM_LombScargle(benchmark::State& state) {
  const auto d = random_series(static_cast<std::size_t>(state.range(0)));
  bnse::LSConfig cfg;
  cfg.grid = bnse::linear_grid(0.0, 1.0, 1000);
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(bnse::lomb_scargle(d, cfg));
}

void BM_NlmlGradient(benchmark::State& state) {
  const auto d = random_series(static_cast<std::size_t>(state.range(0)));
  const auto k = kernel();
  for (auto _ : state) {
    benchmark::DoNotOptimize(bnse::nlml_with_gradient(*k, bnse::NoiseModel{0.1}, d,
                                                      exec_of(state)));
  }
}

void sizes(benchmark::internal::Benchmark* b) {
  b->ArgNames({"n", "parallel"});
  for (long n : {250, 1000}) {
    for (long p : {0, 1}) b->Args({n, p});
  }
  b->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_Gram)->Apply(sizes);
BENCHMARK(BM_PosteriorGrid)->Apply(sizes);
BENCHMARK(BM_LombScargle)->Apply(sizes);
BENCHMARK(BM_NlmlGradient)->Apply(sizes);

}  // namespace

BENCHMARK_MAIN();
