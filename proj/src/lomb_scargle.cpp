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

#include <atomic>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "bnse/baselines.hpp"
#include "bnse/error.hpp"

namespace bnse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerate = 1e-12;

struct Sums {
  double yc = 0.0, ys = 0.0, cc = 0.0, ss = 0.0;
};

// Sums over the observations at angular frequency w with phase origin tau;
// with fit_mean the columns and the data are centred.
Sums design_sums(const std::vector<double>& t, const std::vector<double>& y, double y_mean,
                 double w, double tau, bool fit_mean) {
  const auto n = static_cast<double>(t.size());
  Sums s;
  double c_sum = 0.0, s_sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double arg = w * (t[i] - tau);
    const double c = std::cos(arg);
    const double sn = std::sin(arg);
    const double yv = y[i] - y_mean;
    s.yc += yv * c;
    s.ys += yv * sn;
    s.cc += c * c;
    s.ss += sn * sn;
    c_sum += c;
    s_sum += sn;
  }
  if (fit_mean) {
    s.cc -= c_sum * c_sum / n;
    s.ss -= s_sum * s_sum / n;
  }
  return s;
}

// Phase origin making the (centred) sine and cosine columns orthogonal:
//   tan(2 w tau) = 2 CS / (CC - SS).
double scargle_tau(const std::vector<double>& t, double w, bool fit_mean) {
  if (w == 0.0) return 0.0;
  const auto n = static_cast<double>(t.size());
  double c_sum = 0.0, s_sum = 0.0, s2 = 0.0, c2 = 0.0;
  for (double ti : t) {
    c_sum += std::cos(w * ti);
    s_sum += std::sin(w * ti);
    s2 += std::sin(2.0 * w * ti);
    c2 += std::cos(2.0 * w * ti);
  }
  // 2 CS = sum sin(2wt), CC - SS = sum cos(2wt) before centring.
  double two_cs = s2;
  double cc_minus_ss = c2;
  if (fit_mean) {
    two_cs -= 2.0 * c_sum * s_sum / n;
    cc_minus_ss -= (c_sum * c_sum - s_sum * s_sum) / n;
  }
  return std::atan2(two_cs, cc_minus_ss) / (2.0 * w);
}

}  // namespace

void LSConfig::validate() const {
  if (grid.empty()) throw InputError("Lomb-Scargle: frequency grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw InputError("Lomb-Scargle: grid frequencies must be nonnegative and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InputError("Lomb-Scargle: grid must be strictly increasing");
    }
  }
}

SpectrumEstimate lomb_scargle(const TimeSeries& data, const LSConfig& config) {
  config.validate();
  if (data.size() < 3) throw InputError("Lomb-Scargle needs at least 3 observations");
  const auto& t = data.times();
  const auto& y = data.values();
  const double y_mean = config.fit_mean ? data.mean() : 0.0;
  double yy = 0.0;
  for (double v : y) yy += (v - y_mean) * (v - y_mean);
  const auto n = static_cast<double>(data.size());
  const double dt = data.mean_spacing();

  SpectrumEstimate est(config.grid, "lomb-scargle");
  std::atomic<std::size_t> degenerate{0};
  for_each_index(static_cast<std::ptrdiff_t>(config.grid.size()), config.exec,
                 [&](std::ptrdiff_t k) {
                   const double w = 2.0 * kPi * config.grid[k];
                   const double tau = scargle_tau(t, w, config.fit_mean);
                   const Sums s = design_sums(t, y, y_mean, w, tau, config.fit_mean);
                   double fit = 0.0;
                   bool any = false;
                   if (s.cc > kDegenerate * n) {
                     fit += s.yc * s.yc / s.cc;
                     any = true;
                   }
                   if (s.ss > kDegenerate * n) {
                     fit += s.ys * s.ys / s.ss;
                     any = true;
                   }
                   // At zero frequency the centred design vanishes by construction.
                   if (!any && config.grid[k] > 0.0) degenerate.fetch_add(1, std::memory_order_relaxed);
                   double power = 0.5 * fit;
                   switch (config.normalization) {
                     case LSNormalization::none:
                       break;
                     case LSNormalization::standard:
                       power = yy > 0.0 ? fit / yy : 0.0;
                       break;
                     case LSNormalization::density:
                       power *= dt * dt * n;
                       break;
                   }
                   est.psd_mean[k] = power;
                 });
  if (degenerate > 0) {
    spdlog::warn("Lomb-Scargle: {} grid frequencies have an all-zero design; power set to 0",
                 degenerate.load());
  }
  return est;
}

}  // namespace bnse
