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

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "bnse/error.hpp"
#include "bnse/gp.hpp"
#include "bnse/kernels.hpp"
#include "bnse/spectrum.hpp"
#include "oracle.hpp"

namespace bnse {
namespace {

constexpr double kPi = std::numbers::pi;

class ZeroDensityKernel final : public StationaryKernel {
 public:
  double eval(double) const override { return 0.0; }
  double spectral_density(double) const override { return 0.0; }
  double frequency_scale() const override { return 1.0; }
  std::string type_name() const override { return "zero"; }
  nlohmann::json to_json() const override { return {{"type", "zero"}}; }
};

std::shared_ptr<const SMKernel> two_component() {
  return std::make_shared<SMKernel>(
      std::vector<SMComponent>{{1.0, 0.5, 0.8}, {0.6, 1.5, 0.2}});
}

TimeSeries random_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = u(rng);
    y[i] = g(rng);
  }
  return TimeSeries::from_unsorted(std::move(t), std::move(y));
}

std::vector<std::unique_ptr<SpectralCovariance>> both_modes(const WindowConfig& w) {
  std::vector<std::unique_ptr<SpectralCovariance>> out;
  out.push_back(make_spectral_covariance(two_component(), w, SpectrumMode::exact_sm));
  out.push_back(make_spectral_covariance(two_component(), w, SpectrumMode::delta_approx));
  return out;
}

TEST(PriorCovariance, IsSymmetric) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& cov : both_modes(WindowConfig{0.05, 0.0})) {
    for (int i = 0; i < 200; ++i) {
      const double a = u(rng), b = u(rng);
      EXPECT_DOUBLE_EQ(cov->prior(a, b), cov->prior(b, a));
    }
  }
}

TEST(PriorCovariance, DiagonalPeaksAtComponentFrequency) {
  const SMKernel k(1.0, 5e-3, 2.5);
  const WindowConfig w{5e-5, 0.0};
  double best = -1.0, best_xi = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double xi = -5.0 + 0.01 * i;
    const double v = prior_cov_exact_sm(k, w, xi, xi);
    if (v > best) {
      best = v;
      best_xi = xi;
    }
  }
  EXPECT_NEAR(std::abs(best_xi), 2.5, 0.01);
  EXPECT_NEAR(prior_cov_exact_sm(k, w, 2.5, 2.5), prior_cov_exact_sm(k, w, -2.5, -2.5), 1e-12);
}

TEST(PriorCovariance, ZeroDensityGivesZero) {
  const ZeroDensityKernel k;
  EXPECT_EQ(prior_cov_approx(k, WindowConfig{1e-3, 0.0}, 0.3, 0.2), 0.0);
  EXPECT_EQ(cross_cov_approx(k, WindowConfig{1e-3, 0.0}, 1.0, 0.3), std::complex<double>(0.0));
}

TEST(PriorCovariance, DiagonalMassMatchesKernelVariance) {
  const SMKernel k(std::vector<SMComponent>{{1.0, 0.5, 0.8}, {0.6, 1.5, 0.2}});
  for (double alpha : {0.01, 0.1, 1.0}) {
    const WindowConfig w{alpha, 0.0};
    const double h = 1e-3;
    double mass = 0.0;
    for (double xi = -10.0; xi <= 10.0; xi += h) mass += prior_cov_exact_sm(k, w, xi, xi) * h;
    EXPECT_NEAR(mass / std::sqrt(kPi / (2.0 * alpha)), k.variance(), 0.01 * k.variance());
  }
}

TEST(PriorCovariance, WiderWindowsDecorrelateFrequencies) {
  const SMKernel k(1.0, 0.5, 0.8);
  for (double d : {0.02, 0.05, 0.1}) {
    double previous = 1.0;
    for (double alpha : {1.0, 0.3, 0.1, 0.03, 0.01}) {
      const WindowConfig w{alpha, 0.0};
      const double a = 0.7, b = 0.7 + d;
      const double rho = prior_cov_exact_sm(k, w, a, b) /
                         std::sqrt(prior_cov_exact_sm(k, w, a, a) * prior_cov_exact_sm(k, w, b, b));
      EXPECT_LE(rho, previous + 1e-12) << "d=" << d << " alpha=" << alpha;
      previous = rho;
    }
  }
}

TEST(PseudoCovariance, MatchesReflectedPrior) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& cov : both_modes(WindowConfig{0.05, 0.0})) {
    EXPECT_DOUBLE_EQ(pseudo_cov(*cov, 0.0, 0.0), cov->prior(0.0, 0.0));
    for (int i = 0; i < 100; ++i) {
      const double a = u(rng), b = u(rng);
      EXPECT_DOUBLE_EQ(pseudo_cov(*cov, a, a), cov->prior(a, -a));
      EXPECT_NEAR(pseudo_cov(*cov, a, b), pseudo_cov(*cov, b, a), 1e-14);
      // Both reflection conventions coincide for an even density.
      EXPECT_NEAR(cov->prior(a, -b), cov->prior(-a, b), 1e-14);
    }
  }
}

TEST(RealImagCovariance, SplitsThePrior) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& cov : both_modes(WindowConfig{0.05, 0.0})) {
    for (int i = 0; i < 100; ++i) {
      const double a = u(rng), b = u(rng);
      const auto c = real_imag_covs(*cov, a, b);
      EXPECT_NEAR(c.rr + c.ii, cov->prior(a, b), 1e-14);
      EXPECT_EQ(c.ri, 0.0);
      const auto d = real_imag_covs(*cov, a, a);
      EXPECT_GE(d.rr, 0.0);
      EXPECT_GE(d.ii, 0.0);
      EXPECT_NEAR(real_imag_covs(*cov, a, -a).ii, -d.ii, 1e-14);
    }
  }
}

TEST(CrossCovariance, DecaysAwayFromComponentFrequency) {
  const SMKernel k(1.0, 2.0, 2.5);
  const WindowConfig w{1.0, 0.0};
  const double scale = std::sqrt((1.0 + 2.0) / (kPi * kPi));
  const double peak = std::abs(cross_cov_exact_sm(k, w, 0.0, 2.5));
  EXPECT_LE(std::abs(cross_cov_exact_sm(k, w, 0.0, 2.5 + 5.0 * scale)),
            std::exp(-25.0) * peak * (1.0 + 1e-9));
  // Away from the window centre the modulus decays as exp(-pi^2 L t^2) with
  // L = 1 / (1 / alpha~ + 1 / gamma~) = 2 / (3 pi^2) here.
  EXPECT_NEAR(std::abs(cross_cov_exact_sm(k, w, 3.0, 2.5)) / peak, std::exp(-6.0), 1e-9);
}

TEST(CrossCovariance, NegativeFrequencyIsConjugate) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& cov : both_modes(WindowConfig{0.05, 0.0})) {
    for (int i = 0; i < 100; ++i) {
      const double t = 2.0 * u(rng), xi = u(rng);
      const auto a = cov->cross(t, xi);
      const auto b = cov->cross(t, -xi);
      EXPECT_NEAR(a.real(), b.real(), 1e-14);
      EXPECT_NEAR(a.imag(), -b.imag(), 1e-14);
    }
  }
}

TEST(CrossCovariance, ApproximationHasDensityModulus) {
  const auto k = two_component();
  const WindowConfig w{1e-4, 0.0};
  for (double xi : {0.0, 0.2, 0.5, 0.8, 1.3}) {
    for (double t : {-3.0, 0.7, 11.0}) {
      EXPECT_NEAR(std::abs(cross_cov_approx(*k, w, t, xi)), k->spectral_density(xi), 1e-14);
    }
    const auto at_zero = cross_cov_approx(*k, w, 0.0, xi);
    EXPECT_EQ(at_zero.imag(), 0.0);
    EXPECT_DOUBLE_EQ(at_zero.real(), k->spectral_density(xi));
  }
}

TEST(ApproximationValidity, UsesKernelFrequencyScale) {
  const SMKernel k(1.0, 1.0, 0.5);  // frequency scale 1/pi
  EXPECT_TRUE(approximation_valid(k, WindowConfig{0.009, 0.0}));
  EXPECT_FALSE(approximation_valid(k, WindowConfig{0.02, 0.0}));
}

TEST(WindowConfig, AutomaticUsesHalfSpan) {
  const TimeSeries d({2.0, 3.0, 6.0}, {0.0, 1.0, 0.0});
  const auto w = WindowConfig::automatic(d);
  EXPECT_DOUBLE_EQ(w.alpha, 1.0 / (2.0 * 2.0 * 2.0));
  EXPECT_DOUBLE_EQ(w.centre, 4.0);
  EXPECT_THROW((WindowConfig{0.0, 0.0}.validate()), InputError);
  EXPECT_THROW((WindowConfig{-1.0, 0.0}.validate()), InputError);
}

TEST(DefaultGrid, SpansToAverageNyquist) {
  const TimeSeries d({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 1.0, 0.0, 1.0, 0.0});
  const auto g = default_grid(d);
  ASSERT_EQ(g.size(), 1000u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), 5.0 / 8.0);
}

TEST(Posterior, PriorOnlyEqualsPrior) {
  const auto k = two_component();
  const auto post = SpectrumPosterior::prior_only(k, WindowConfig{0.05, 0.0});
  for (double xi : {-1.0, 0.0, 0.3, 0.8}) {
    const auto m = post.mean(xi);
    EXPECT_EQ(m.re, 0.0);
    EXPECT_EQ(m.im, 0.0);
    const auto v = post.variance(xi);
    const auto p = real_imag_covs(post.prior(), xi, xi);
    EXPECT_DOUBLE_EQ(v.rr, p.rr);
    EXPECT_DOUBLE_EQ(v.ii, p.ii);
  }
}

TEST(Posterior, VarianceNeverExceedsPrior) {
  const auto d = random_series(30, 5);
  for (auto mode : {SpectrumMode::exact_sm, SpectrumMode::delta_approx}) {
    auto gp = std::make_shared<const TrainedGP>(two_component(), NoiseModel{0.1}, d);
    const SpectrumPosterior post(gp, WindowConfig{0.01, 0.0}, mode);
    for (double xi = -2.0; xi <= 2.0; xi += 0.05) {
      const auto v = post.variance(xi);
      const auto p = real_imag_covs(post.prior(), xi, xi);
      EXPECT_GE(v.rr, 0.0);
      EXPECT_GE(v.ii, 0.0);
      const double slack = 1e-12 * (p.rr + p.ii);
      EXPECT_LE(v.rr, p.rr + slack);
      EXPECT_LE(v.ii, p.ii + slack);
    }
  }
}

TEST(Posterior, MeanIsLinearInObservations) {
  const auto d1 = random_series(25, 6);
  std::vector<double> y2(d1.size()), y3(d1.size());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < y2.size(); ++i) {
    y2[i] = g(rng);
    y3[i] = 2.0 * d1.values()[i] - 0.5 * y2[i];
  }
  const TimeSeries d2(d1.times(), y2), d3(d1.times(), y3);
  const WindowConfig w{0.02, 0.5};
  auto make = [&](const TimeSeries& d) {
    return SpectrumPosterior(std::make_shared<const TrainedGP>(two_component(), NoiseModel{0.1}, d),
                             w);
  };
  const auto p1 = make(d1), p2 = make(d2), p3 = make(d3);
  for (double xi : {-0.9, 0.1, 0.4, 0.8, 1.7}) {
    const auto a = p1.mean(xi), b = p2.mean(xi), c = p3.mean(xi);
    EXPECT_NEAR(c.re, 2.0 * a.re - 0.5 * b.re, 1e-10);
    EXPECT_NEAR(c.im, 2.0 * a.im - 0.5 * b.im, 1e-10);
  }
}

TEST(Posterior, EvaluateMatchesPointwiseQueries) {
  const auto d = random_series(20, 8);
  auto gp = std::make_shared<const TrainedGP>(two_component(), NoiseModel{0.1}, d);
  const SpectrumPosterior post(gp, WindowConfig{0.02, 0.0});
  const auto grid = linear_grid(0.0, 2.0, 41);
  const auto est = post.evaluate(grid);
  ASSERT_NO_THROW(est.validate());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto m = post.mean(grid[i]);
    const auto v = post.variance(grid[i]);
    EXPECT_EQ(est.mean_real[i], m.re);
    EXPECT_EQ(est.mean_imag[i], m.im);
    EXPECT_EQ(est.var_real[i], v.rr);
    EXPECT_EQ(est.var_imag[i], v.ii);
    EXPECT_NEAR(est.psd_mean[i], m.re * m.re + m.im * m.im + v.rr + v.ii, 1e-14);
    EXPECT_NEAR(est.psd_mean[i], post.psd_mean(grid[i]), 1e-14);
    EXPECT_GE(est.psd_mean[i], 0.0);
    const double sd2 = 2 * v.rr * v.rr + 4 * m.re * m.re * v.rr + 2 * v.ii * v.ii +
                       4 * m.im * m.im * v.ii;
    EXPECT_NEAR(est.psd_std(i), std::sqrt(sd2), 1e-12);
  }
  const auto cov = post.grid_covariance(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    EXPECT_NEAR(cov.rr(e, e), est.var_real[i], 1e-12);
    EXPECT_NEAR(cov.ii(e, e), est.var_imag[i], 1e-12);
    EXPECT_NEAR(cov.mean_re(e), est.mean_real[i], 1e-12 * (1.0 + std::abs(est.mean_real[i])));
  }
}

TEST(Posterior, GridCovariancesArePositiveSemidefinite) {
  const auto d = random_series(30, 9);
  auto gp = std::make_shared<const TrainedGP>(two_component(), NoiseModel{0.1}, d);
  const SpectrumPosterior post(gp, WindowConfig{0.02, 0.0});
  const auto grid = linear_grid(0.0, 2.0, 100);
  const auto cov = post.grid_covariance(grid);
  for (const Eigen::MatrixXd* m : {&cov.rr, &cov.ii}) {
    EXPECT_TRUE(m->isApprox(m->transpose()));
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(*m).eigenvalues().minCoeff();
    EXPECT_GE(lo, -1e-8 * m->trace());
  }
}

// Draw a dense noiseless path, observe every fourth point with small noise and
// compare the posterior mean spectrum with the windowed transform of the path.
TEST(Posterior, TracksWindowedTransformOfTheSignal) {
  const auto kernel = std::make_shared<SMKernel>(1.0, 2.0, 1.0);
  const auto fine = testing::fine_grid(-10.0, 10.0, 0.05);
  const auto root = testing::covariance_root(testing::kernel_matrix(*kernel, fine.t, fine.t));
  const Eigen::MatrixXd path =
      testing::draw_paths(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fine.t.size())), root,
                          1, 21);
  std::mt19937_64 rng(22);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> t, y;
  for (std::size_t i = 0; i < fine.t.size(); i += 4) {
    t.push_back(fine.t[i]);
    y.push_back(path(0, static_cast<Eigen::Index>(i)) + noise(rng));
  }
  const WindowConfig w{0.1, 0.0};
  auto gp = std::make_shared<const TrainedGP>(kernel, NoiseModel{1e-4}, TimeSeries(t, y));
  const SpectrumPosterior post(gp, w);
  std::vector<double> freqs;
  for (double xi = -3.0; xi <= 3.0; xi += 0.05) freqs.push_back(xi);
  const Eigen::MatrixXcd truth = testing::windowed_dft(path, fine, w.alpha, w.centre, freqs);
  Eigen::VectorXd a(2 * freqs.size()), b(2 * freqs.size());
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const auto m = post.mean(freqs[k]);
    a(2 * k) = m.re;
    a(2 * k + 1) = m.im;
    b(2 * k) = truth(0, static_cast<Eigen::Index>(k)).real();
    b(2 * k + 1) = truth(0, static_cast<Eigen::Index>(k)).imag();
  }
  const Eigen::VectorXd ac = a.array() - a.mean();
  const Eigen::VectorXd bc = b.array() - b.mean();
  EXPECT_GE(ac.dot(bc) / (ac.norm() * bc.norm()), 0.95);
}

TEST(DtftLimit, SingleObservationIsFlat) {
  const TimeSeries d({0.0}, {1.0});
  for (double xi : {-2.0, 0.0, 0.3, 7.0}) {
    const auto v = dtft_limit_mean(d, xi);
    EXPECT_NEAR(v.real(), 1.0, 1e-15);
    EXPECT_NEAR(v.imag(), 0.0, 1e-15);
  }
}

TEST(DtftLimit, CosinePeaksAtItsFrequency) {
  std::vector<double> t(64), y(64);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = 0.25 * static_cast<double>(i);
    y[i] = std::cos(2.0 * kPi * 0.5 * t[i]);
  }
  const TimeSeries d(t, y);
  double best = 0.0, best_xi = 0.0;
  for (double xi = -1.9; xi <= 1.9; xi += 0.01) {
    const double v = std::abs(dtft_limit_mean(d, xi));
    if (v > best) {
      best = v;
      best_xi = xi;
    }
  }
  EXPECT_NEAR(std::abs(best_xi), 0.5, 0.01);
  EXPECT_NEAR(std::abs(dtft_limit_mean(d, 0.5)), std::abs(dtft_limit_mean(d, -0.5)), 1e-10);
}

TEST(SamplePsd, NonnegativeReproducibleAndUnbiased) {
  const auto d = random_series(20, 10);
  auto gp = std::make_shared<const TrainedGP>(two_component(), NoiseModel{0.1}, d);
  const SpectrumPosterior post(gp, WindowConfig{0.02, 0.0});
  const auto grid = linear_grid(0.0, 1.5, 30);
  const auto s = sample_psd(post, grid, 4000, 3);
  ASSERT_EQ(s.rows(), 4000);
  ASSERT_EQ(s.cols(), 30);
  EXPECT_GE(s.minCoeff(), 0.0);
  EXPECT_EQ(s, sample_psd(post, grid, 4000, 3));
  const auto est = post.evaluate(grid);
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    const double mean = s.col(j).mean();
    const double se = est.psd_std(static_cast<std::size_t>(j)) / std::sqrt(4000.0);
    EXPECT_LE(std::abs(mean - est.psd_mean[static_cast<std::size_t>(j)]), 4.0 * se) << j;
  }
  EXPECT_EQ(sample_psd(post, grid, 0, 3).rows(), 0);
}

TEST(SampleSpectrum, RealAndImaginaryDrawsMatchTheirMoments) {
  const auto d = random_series(20, 11);
  auto gp = std::make_shared<const TrainedGP>(two_component(), NoiseModel{0.1}, d);
  const SpectrumPosterior post(gp, WindowConfig{0.02, 0.0});
  const auto grid = linear_grid(0.1, 1.5, 8);
  const auto draws = sample_spectrum(post, grid, 20000, 5);
  const auto est = post.evaluate(grid);
  for (Eigen::Index j = 0; j < 8; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const double vr = est.var_real[k], vi = est.var_imag[k];
    EXPECT_LE(std::abs(draws.re.col(j).mean() - est.mean_real[k]), 4.0 * std::sqrt(vr / 20000));
    EXPECT_LE(std::abs(draws.im.col(j).mean() - est.mean_imag[k]), 4.0 * std::sqrt(vi / 20000));
    const double er = (draws.re.col(j).array() - est.mean_real[k]).square().mean();
    EXPECT_NEAR(er, vr, 4.0 * vr * std::sqrt(2.0 / 20000));
  }
}

}  // namespace
}  // namespace bnse
