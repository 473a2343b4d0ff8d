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

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "bnse/error.hpp"
#include "bnse/gp.hpp"
#include "bnse/kernels.hpp"

namespace bnse {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::shared_ptr<const StationaryKernel>> library_kernels() {
  return {
      std::make_shared<SMKernel>(std::vector<SMComponent>{{1.0, 2.0, 0.7}, {0.5, 0.3, 0.0}}),
      std::make_shared<SquaredExponentialKernel>(1.5, 0.4),
      std::make_shared<MaternKernel>(0.5, 1.0, 0.7),
      std::make_shared<MaternKernel>(1.5, 2.0, 0.3),
      std::make_shared<MaternKernel>(2.5, 0.7, 1.1),
      std::make_shared<SincKernel>(1.2, 1.5),
  };
}

// Trapezoid rule on [-b, b].
template <class F>
double trapezoid(F f, double b, int n) {
  const double h = 2.0 * b / n;
  double s = 0.5 * (f(-b) + f(b));
  for (int i = 1; i < n; ++i) s += f(-b + i * h);
  return s * h;
}

TEST(SMKernel, EvaluatesAtZeroLag) {
  EXPECT_DOUBLE_EQ(SMKernel(1.0, 1.0, 0.0).eval(0.0), 1.0);
  const SMKernel two(std::vector<SMComponent>{{2.0, 0.3, 1.0}, {3.0, 7.0, 0.2}});
  EXPECT_DOUBLE_EQ(two.eval(0.0), 5.0);
  EXPECT_DOUBLE_EQ(two.variance(), 5.0);
}

TEST(SMKernel, EvaluatesTheFormula) {
  // exp(-5e-3 * 0.2^2) cos(2 pi 2.5 0.2) = -exp(-2e-4).
  EXPECT_NEAR(SMKernel(1.0, 5e-3, 2.5).eval(0.2), -std::exp(-2e-4), 1e-14);
  EXPECT_NEAR(SMKernel(1.0, 5e-3, 2.5).eval(0.2), -0.99980002, 1e-8);
}

TEST(SMKernel, SpectralDensityAtZero) {
  EXPECT_NEAR(SMKernel(1.0, kPi * kPi, 0.0).spectral_density(0.0), 1.0 / std::sqrt(kPi), 1e-15);
}

TEST(SMKernel, RejectsInvalidComponents) {
  EXPECT_THROW(SMKernel(0.0, 1.0, 0.0), InputError);
  EXPECT_THROW(SMKernel(1.0, -1.0, 0.0), InputError);
  EXPECT_THROW(SMKernel(1.0, 1.0, -0.1), InputError);
  EXPECT_THROW(SMKernel(std::vector<SMComponent>{}), InputError);
  EXPECT_THROW(SMKernel(std::nan(""), 1.0, 0.0), InputError);
}

TEST(Kernels, EvenAndBoundedByZeroLag) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (const auto& k : library_kernels()) {
    for (int i = 0; i < 500; ++i) {
      const double tau = u(rng);
      EXPECT_DOUBLE_EQ(k->eval(tau), k->eval(-tau)) << k->type_name();
      EXPECT_LE(std::abs(k->eval(tau)), k->eval(0.0) * (1.0 + 1e-12)) << k->type_name();
      const double xi = u(rng) / 4.0;
      EXPECT_DOUBLE_EQ(k->spectral_density(xi), k->spectral_density(-xi)) << k->type_name();
      EXPECT_GE(k->spectral_density(xi), 0.0) << k->type_name();
    }
  }
}

TEST(Kernels, DensityIntegratesToZeroLagValue) {
  const SMKernel sm(std::vector<SMComponent>{{1.0, 2.0, 0.7}, {0.5, 0.3, 0.0}});
  EXPECT_NEAR(trapezoid([&](double x) { return sm.spectral_density(x); }, 20.0, 40000),
              sm.eval(0.0), 1e-6);
  const SquaredExponentialKernel se(1.5, 0.4);
  EXPECT_NEAR(trapezoid([&](double x) { return se.spectral_density(x); }, 20.0, 40000), 1.5,
              1e-6);
  const MaternKernel m52(2.5, 0.7, 1.1);
  EXPECT_NEAR(trapezoid([&](double x) { return m52.spectral_density(x); }, 200.0, 400000), 0.7,
              1e-5);
}

// The density is the Fourier transform of the covariance:
//   S(xi) = int K(tau) cos(2 pi xi tau) d tau.
TEST(Kernels, DensityIsFourierTransformOfCovariance) {
  const SMKernel sm(std::vector<SMComponent>{{1.0, 2.0, 0.7}, {0.5, 0.3, 0.0}});
  const SquaredExponentialKernel se(1.5, 0.4);
  const MaternKernel m32(1.5, 2.0, 0.3);
  const std::vector<const StationaryKernel*> smooth = {&sm, &se};
  for (const auto* k : smooth) {
    for (double xi : {0.0, 0.3, 0.7, 1.1}) {
      const double ft = trapezoid([&](double t) { return k->eval(t) * std::cos(2 * kPi * xi * t); },
                                  30.0, 60000);
      EXPECT_NEAR(ft, k->spectral_density(xi), 1e-4 * k->spectral_density(xi)) << k->type_name();
    }
  }
  for (double xi : {0.0, 0.5}) {
    const double ft = trapezoid([&](double t) { return m32.eval(t) * std::cos(2 * kPi * xi * t); },
                                40.0, 400000);
    EXPECT_NEAR(ft, m32.spectral_density(xi), 1e-4 * m32.spectral_density(xi));
  }
}

TEST(Kernels, SquaredExponentialIsSMWithZeroFrequency) {
  const SquaredExponentialKernel se(1.5, 0.4);
  const SMKernel sm = se.as_sm();
  for (double tau : {0.0, 0.1, 0.5, 2.0}) EXPECT_NEAR(se.eval(tau), sm.eval(tau), 1e-15);
  for (double xi : {0.0, 0.2, 1.0}) {
    EXPECT_NEAR(se.spectral_density(xi), sm.spectral_density(xi), 1e-14);
  }
}

TEST(Kernels, LaplaceIsMaternOneHalf) {
  const MaternKernel laplace(0.5, 2.0, 0.5);
  EXPECT_NEAR(laplace.eval(0.7), 2.0 * std::exp(-0.7 / 0.5), 1e-14);
  EXPECT_THROW(MaternKernel(1.0, 1.0, 1.0), InputError);
}

TEST(Kernels, SincHasBoxDensity) {
  const SincKernel sinc(1.2, 1.5);
  EXPECT_NEAR(sinc.spectral_density(0.3), 1.2 / 3.0, 1e-15);
  EXPECT_EQ(sinc.spectral_density(1.6), 0.0);
  EXPECT_NEAR(sinc.eval(1.0 / 3.0), 0.0, 1e-15);  // first zero at 1 / (2B)
}

TEST(KernelGram, SingleTimeIsZeroLagPlusJitter) {
  const SMKernel k(2.0, 1.0, 0.3);
  const std::vector<double> t = {0.5};
  const auto g = kernel_gram(k, NoiseModel{0.0}, t, 1e-10);
  ASSERT_EQ(g.rows(), 1);
  EXPECT_DOUBLE_EQ(g(0, 0), 2.0 + 1e-10);
}

TEST(KernelGram, RepeatedTimesFactorizeWithNoise) {
  const SMKernel k(1.0, 1.0, 0.0);
  const std::vector<double> t = {0.0, 0.0, 1.0, 1.0};
  EXPECT_NO_THROW(factorize_gram(k, NoiseModel{0.1}, t));
}

TEST(KernelGram, RandomGramIsPositiveDefinite) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> t(20);
  for (auto& v : t) v = u(rng);
  const SMKernel k(std::vector<SMComponent>{{1.0, 0.5, 0.3}, {0.4, 2.0, 1.0}});
  const auto g = kernel_gram(k, NoiseModel{1e-6}, t);
  EXPECT_TRUE(g.isApprox(g.transpose(), 0.0));
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
  EXPECT_GT(ev.minCoeff(), 0.0);
}

TEST(KernelGram, EveryLibraryKernelFactorizesOnDistinctGrids) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (const auto& k : library_kernels()) {
    for (std::size_t n : {5u, 50u, 200u}) {
      std::vector<double> t(n);
      for (auto& v : t) v = u(rng);
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      EXPECT_NO_THROW(factorize_gram(*k, NoiseModel{1e-8}, t)) << k->type_name() << " n=" << n;
    }
  }
}

TEST(KernelGram, EmptyTimesAreRejected) {
  const SMKernel k(1.0, 1.0, 0.0);
  EXPECT_THROW(factorize_gram(k, NoiseModel{0.1}, std::vector<double>{}), InputError);
}

TEST(KernelJson, RoundTrips) {
  const KernelSpec spec{
      std::make_shared<SMKernel>(std::vector<SMComponent>{{1.0, 2.0, 0.7}, {0.5, 0.3, 0.0}}),
      NoiseModel{0.25}};
  const auto doc = kernel_spec_to_json(spec);
  EXPECT_EQ(doc["type"], "sm");
  const auto back = kernel_spec_from_json(doc);
  EXPECT_EQ(back.noise.sigma2, 0.25);
  for (double tau : {0.0, 0.3, 1.7}) EXPECT_EQ(back.kernel->eval(tau), spec.kernel->eval(tau));
}

TEST(KernelJson, ParsesInlineSpecs) {
  const auto se = load_kernel_spec(R"({"type":"se","sigma2":2,"lengthscale":0.5})");
  EXPECT_EQ(se.kernel->type_name(), "se");
  EXPECT_DOUBLE_EQ(se.kernel->eval(0.0), 2.0);
  const auto lap = load_kernel_spec(R"({"type":"laplace","sigma2":1,"lengthscale":1})");
  EXPECT_EQ(lap.kernel->type_name(), "matern");
  EXPECT_THROW(load_kernel_spec(R"({"type":"nope"})"), InputError);
  EXPECT_THROW(load_kernel_spec(R"({"type":"sm","components":[]})"), InputError);
  EXPECT_THROW(load_kernel_spec("/no/such/kernel.json"), InputError);
}

TEST(NoiseModel, RejectsNegativeVariance) {
  EXPECT_THROW(NoiseModel{-1.0}.validate(), InputError);
  EXPECT_NO_THROW(NoiseModel{0.0}.validate());
}

}  // namespace
}  // namespace bnse
