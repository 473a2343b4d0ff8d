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
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bnse/baselines.hpp"
#include "bnse/error.hpp"
#include "bnse/spectrum_estimate.hpp"

namespace bnse {
namespace {

constexpr double kPi = std::numbers::pi;

TimeSeries two_tone(std::size_t n, std::uint64_t seed, double noise_sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise_sd);
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = -10.0 + 20.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = 10.0 * std::cos(2 * kPi * 0.5 * t[i]) - 5.0 * std::sin(2 * kPi * t[i]) + g(rng);
  }
  return TimeSeries(t, y);
}

TimeSeries noise_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i);
    y[i] = g(rng);
  }
  return TimeSeries(t, y);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Indices of the k largest interior local maxima.
std::vector<std::size_t> top_local_maxima(const std::vector<double>& v, std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] >= v[i - 1] && v[i] >= v[i + 1]) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] > v[b]; });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

TEST(LombScargle, RecoversPureCosine) {
  std::vector<double> t(200), y(200);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = 0.1 * static_cast<double>(i);
    y[i] = 10.0 * std::cos(2 * kPi * 0.5 * t[i]);
  }
  LSConfig cfg;
  cfg.grid = linear_grid(0.01, 2.0, 200);
  const auto est = lomb_scargle(TimeSeries(t, y), cfg);
  EXPECT_NEAR(est.grid[argmax(est.psd_mean)], 0.5, 0.01);
}

TEST(LombScargle, TwoTonePowerRatio) {
  LSConfig cfg;
  cfg.grid = linear_grid(0.0, 3.0, 3001);
  const auto est = lomb_scargle(two_tone(240, 0), cfg);
  const auto peaks = top_local_maxima(est.psd_mean, 2);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_NEAR(est.grid[peaks[0]], 0.5, 0.01);
  EXPECT_NEAR(est.grid[peaks[1]], 1.0, 0.01);
  const double ratio = est.psd_mean[peaks[0]] / est.psd_mean[peaks[1]];
  EXPECT_NEAR(ratio, 4.0, 1.0);
}

TEST(LombScargle, ConstantSignalHasNoPower) {
  std::vector<double> t = {0.0, 0.7, 1.1, 2.9, 3.3, 5.0, 6.4};
  const TimeSeries d(t, std::vector<double>(t.size(), 3.0));
  LSConfig cfg;
  cfg.grid = linear_grid(0.05, 2.0, 50);
  for (auto norm : {LSNormalization::none, LSNormalization::standard, LSNormalization::density}) {
    cfg.normalization = norm;
    const auto est = lomb_scargle(d, cfg);
    for (double p : est.psd_mean) EXPECT_NEAR(p, 0.0, 1e-20);
  }
}

TEST(LombScargle, InvariantToTimeTranslation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  std::vector<double> t(60), y(60);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = u(rng);
    y[i] = std::sin(2 * kPi * 0.3 * t[i]) + 0.2 * u(rng) / 30.0;
  }
  const auto d = TimeSeries::from_unsorted(t, y);
  LSConfig cfg;
  cfg.grid = linear_grid(0.0, 1.0, 101);
  const auto a = lomb_scargle(d, cfg);
  const auto b = lomb_scargle(d.shifted(1000.25), cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.psd_mean[i], b.psd_mean[i], 1e-8 * (1.0 + a.psd_mean[i]));
  }
}

TEST(LombScargle, EqualsPeriodogramOnFourierFrequencies) {
  const auto d = noise_series(64, 4);
  const auto per = periodogram(d);
  LSConfig cfg;
  cfg.fit_mean = false;
  // Interior bins: the end bins have a single nonzero column.
  cfg.grid.assign(per.grid.begin() + 1, per.grid.end() - 1);
  const auto ls = lomb_scargle(d, cfg);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    EXPECT_NEAR(ls.psd_mean[i], per.psd_mean[i + 1], 1e-8 * per.psd_mean[i + 1]);
  }
}

TEST(LombScargle, OutputsArePointEstimates) {
  LSConfig cfg;
  cfg.grid = linear_grid(0.0, 2.0, 50);
  const auto est = lomb_scargle(two_tone(100, 1), cfg);
  for (std::size_t i = 0; i < est.size(); ++i) {
    EXPECT_EQ(est.var_real[i], 0.0);
    EXPECT_EQ(est.var_imag[i], 0.0);
    EXPECT_GE(est.psd_mean[i], 0.0);
  }
}

TEST(LombScargle, RejectsBadConfiguration) {
  LSConfig cfg;
  EXPECT_THROW(lomb_scargle(two_tone(10, 0), cfg), InputError);
  cfg.grid = {0.3, 0.2};
  EXPECT_THROW(lomb_scargle(two_tone(10, 0), cfg), InputError);
  cfg.grid = {-0.1, 0.2};
  EXPECT_THROW(lomb_scargle(two_tone(10, 0), cfg), InputError);
  cfg.grid = {0.1};
  EXPECT_THROW(lomb_scargle(TimeSeries({0.0, 1.0}, {1.0, 2.0}), cfg), InputError);
}

TEST(Periodogram, ImpulseIsFlat) {
  std::vector<double> t(32), y(32, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  y[5] = 1.0;
  const auto est = periodogram(TimeSeries(t, y));
  ASSERT_EQ(est.size(), 17u);
  for (double p : est.psd_mean) EXPECT_NEAR(p, 1.0 / 32.0, 1e-15);
}

TEST(Periodogram, BinCentredCosineHasOneDominantBin) {
  std::vector<double> t(64), y(64);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(i);
    y[i] = std::cos(2 * kPi * 8.0 / 64.0 * t[i]);
  }
  const auto est = periodogram(TimeSeries(t, y));
  const auto k = argmax(est.psd_mean);
  EXPECT_EQ(k, 8u);
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (i != k) {
      EXPECT_LT(est.psd_mean[i], 1e-20);
    }
  }
}

TEST(Periodogram, Parseval) {
  const auto d = noise_series(101, 5);
  for (int pad : {1, 2, 3}) {
    const auto est = periodogram(d, pad);
    const std::size_t m = d.size() * static_cast<std::size_t>(pad);
    double total = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k) {
      const bool self_mirrored = k == 0 || (m % 2 == 0 && k == m / 2);
      total += (self_mirrored ? 1.0 : 2.0) * est.psd_mean[k];
    }
    double ms = 0.0;
    for (double v : d.values()) ms += v * v;
    ms /= static_cast<double>(d.size());
    EXPECT_NEAR(total / static_cast<double>(m), ms, 1e-10 * ms) << "pad " << pad;
  }
}

TEST(Periodogram, AtArbitraryFrequenciesMatchesFftBins) {
  const auto d = noise_series(50, 6);
  const auto fft = periodogram(d, 2);
  const auto direct = periodogram_at(d, fft.grid);
  for (std::size_t k = 0; k < fft.size(); ++k) {
    EXPECT_NEAR(direct.psd_mean[k], fft.psd_mean[k], 1e-10 * (1.0 + fft.psd_mean[k]));
  }
}

TEST(Periodogram, RejectsUnevenSampling) {
  const TimeSeries d({0.0, 1.0, 2.5, 3.0}, {1.0, 2.0, 3.0, 4.0});
  try {
    periodogram(d);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("Lomb-Scargle"), std::string::npos);
  }
  EXPECT_THROW(periodogram(noise_series(8, 0), 0), InputError);
}

TEST(Music, TwoTonePeaks) {
  const auto d = two_tone(240, 0);
  const auto grid = linear_grid(0.0, 3.0, 3001);
  const auto est = music(d, MUSICConfig{4, 40}, grid);
  const auto peaks = top_local_maxima(est.psd_mean, 2);
  ASSERT_EQ(peaks.size(), 2u);
  std::vector<double> f = {est.grid[peaks[0]], est.grid[peaks[1]]};
  std::sort(f.begin(), f.end());
  EXPECT_NEAR(f[0], 0.5, 0.01);
  EXPECT_NEAR(f[1], 1.0, 0.01);
}

TEST(Music, PureNoiseHasNoDominantLine) {
  const auto d = noise_series(240, 7);
  const auto est = music(d, MUSICConfig{2, 40}, linear_grid(0.0, 0.5, 501));
  std::vector<double> sorted = est.psd_mean;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  EXPECT_LE(*std::max_element(est.psd_mean.begin(), est.psd_mean.end()), 10.0 * median);
}

TEST(Music, NoiselessToneIsCapped) {
  std::vector<double> t(100), y(100);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(i);
    y[i] = std::cos(2 * kPi * 0.125 * t[i]);
  }
  const std::vector<double> grid = {0.05, 0.125, 0.3};
  const auto est = music(TimeSeries(t, y), MUSICConfig{2, 20}, grid);
  EXPECT_GT(est.psd_mean[1], 1e8);
  EXPECT_LE(est.psd_mean[1], kMusicCeiling);
  EXPECT_LT(est.psd_mean[0], est.psd_mean[1]);
  EXPECT_LT(est.psd_mean[2], est.psd_mean[1]);
}

TEST(Music, ValidatesConfiguration) {
  const auto d = noise_series(40, 0);
  const std::vector<double> grid = {0.1};
  EXPECT_THROW(music(d, MUSICConfig{0, 10}, grid), InputError);
  EXPECT_THROW(music(d, MUSICConfig{10, 10}, grid), InputError);
  EXPECT_THROW(music(d, MUSICConfig{2, 21}, grid), InputError);
  EXPECT_NO_THROW(music(d, MUSICConfig{2, 20}, grid));
  EXPECT_THROW(music(TimeSeries({0.0, 1.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0},
                                std::vector<double>(10, 1.0)),
                     MUSICConfig{1, 3}, grid),
               InputError);
}

TEST(Baselines, OutputsAreNonnegative) {
  const auto d = two_tone(120, 9);
  const auto grid = linear_grid(0.0, 2.9, 300);
  LSConfig cfg;
  cfg.grid = grid;
  for (const auto& est : {lomb_scargle(d, cfg), periodogram(d, 2), periodogram_at(d, grid),
                          music(d, MUSICConfig{4, 30}, grid)}) {
    for (double p : est.psd_mean) EXPECT_GE(p, 0.0) << est.method;
  }
}

}  // namespace
}  // namespace bnse
