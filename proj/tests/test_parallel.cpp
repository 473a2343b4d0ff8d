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

#include <memory>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bnse/baselines.hpp"
#include "bnse/gp.hpp"
#include "bnse/spectrum.hpp"

// The OpenMP paths must reproduce the serial reference bit for bit.

namespace bnse {
namespace {

TimeSeries random_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = u(rng);
    y[i] = g(rng);
  }
  return TimeSeries::from_unsorted(std::move(t), std::move(y));
}

std::shared_ptr<const SMKernel> kernel() {
  return std::make_shared<SMKernel>(std::vector<SMComponent>{{1.0, 0.1, 0.3}, {0.5, 0.5, 0.05}});
}

TEST(Parallel, GramIsIdentical) {
  const auto d = random_series(300, 1);
  EXPECT_EQ(kernel_gram(*kernel(), NoiseModel{0.1}, d.times(), 0.0, Exec::serial),
            kernel_gram(*kernel(), NoiseModel{0.1}, d.times(), 0.0, Exec::parallel));
}

TEST(Parallel, NlmlGradientIsIdentical) {
  const auto d = random_series(120, 2);
  const auto a = nlml_with_gradient(*kernel(), NoiseModel{0.1}, d, Exec::serial);
  const auto b = nlml_with_gradient(*kernel(), NoiseModel{0.1}, d, Exec::parallel);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Parallel, PosteriorEvaluationIsIdentical) {
  const auto d = random_series(200, 3);
  for (auto mode : {SpectrumMode::exact_sm, SpectrumMode::delta_approx}) {
    auto serial_gp = std::make_shared<const TrainedGP>(kernel(), NoiseModel{0.1}, d, Exec::serial);
    auto parallel_gp = std::make_shared<const TrainedGP>(kernel(), NoiseModel{0.1}, d);
    const SpectrumPosterior a(serial_gp, WindowConfig{1e-5, 25.0}, mode);
    const SpectrumPosterior b(parallel_gp, WindowConfig{1e-5, 25.0}, mode);
    const auto grid = linear_grid(0.0, 1.0, 257);
    const auto ea = a.evaluate(grid, Exec::serial);
    const auto eb = b.evaluate(grid, Exec::parallel);
    EXPECT_EQ(ea.mean_real, eb.mean_real);
    EXPECT_EQ(ea.mean_imag, eb.mean_imag);
    EXPECT_EQ(ea.var_real, eb.var_real);
    EXPECT_EQ(ea.var_imag, eb.var_imag);
    EXPECT_EQ(ea.psd_mean, eb.psd_mean);
    const auto small = linear_grid(0.0, 1.0, 60);
    const auto ca = a.grid_covariance(small, Exec::serial);
    const auto cb = b.grid_covariance(small, Exec::parallel);
    EXPECT_EQ(ca.rr, cb.rr);
    EXPECT_EQ(ca.ii, cb.ii);
  }
}

TEST(Parallel, LombScargleIsIdentical) {
  const auto d = random_series(500, 4);
  LSConfig cfg;
  cfg.grid = linear_grid(0.0, 2.0, 1001);
  cfg.exec = Exec::serial;
  const auto a = lomb_scargle(d, cfg);
  cfg.exec = Exec::parallel;
  const auto b = lomb_scargle(d, cfg);
  EXPECT_EQ(a.psd_mean, b.psd_mean);
}

TEST(Parallel, TrainingIsIdentical) {
  const auto d = random_series(60, 5);
  TrainConfig cfg;
  cfg.restarts = 3;
  cfg.seed = 2;
  cfg.exec = Exec::serial;
  const auto a = train(d, SMKernel(1.0, 0.2, 0.1), NoiseModel{0.3}, cfg);
  cfg.exec = Exec::parallel;
  const auto b = train(d, SMKernel(1.0, 0.2, 0.1), NoiseModel{0.3}, cfg);
  EXPECT_EQ(a.nlml_final, b.nlml_final);
  EXPECT_EQ(a.best_restart, b.best_restart);
  EXPECT_EQ(encode_log_params(a.kernel, a.noise), encode_log_params(b.kernel, b.noise));
}

}  // namespace
}  // namespace bnse
