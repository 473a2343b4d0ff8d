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
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "bnse/baselines.hpp"
#include "bnse/error.hpp"

namespace bnse {

namespace {

void require_uniform(const TimeSeries& data, const char* who) {
  if (data.size() < 2) throw InputError(std::string(who) + " needs at least 2 observations");
  if (!data.is_uniform(1e-9)) {
    throw InputError(std::string(who) +
                     " requires uniformly sampled data; use Lomb-Scargle (method 'ls') or "
                     "BNSE for uneven sampling");
  }
}

}  // namespace

SpectrumEstimate periodogram(const TimeSeries& data, int zero_pad_factor) {
  require_uniform(data, "periodogram");
  if (zero_pad_factor < 1) throw InputError("periodogram: zero_pad_factor must be >= 1");
  const std::size_t n = data.size();
  const std::size_t m = n * static_cast<std::size_t>(zero_pad_factor);
  std::vector<double> padded(m, 0.0);
  std::copy(data.values().begin(), data.values().end(), padded.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);

  const double dt = data.mean_spacing();
  const std::size_t bins = m / 2 + 1;
  std::vector<double> grid(bins);
  for (std::size_t k = 0; k < bins; ++k) grid[k] = static_cast<double>(k) / (static_cast<double>(m) * dt);
  SpectrumEstimate est(std::move(grid), "periodogram");
  for (std::size_t k = 0; k < bins; ++k) {
    est.psd_mean[k] = std::norm(spectrum[k]) / static_cast<double>(n);
  }
  return est;
}

SpectrumEstimate periodogram_at(const TimeSeries& data, std::span<const double> grid) {
  require_uniform(data, "periodogram");
  SpectrumEstimate est(std::vector<double>(grid.begin(), grid.end()), "periodogram");
  const auto n = static_cast<double>(data.size());
  const double t0 = data.times().front();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double phase = -2.0 * std::numbers::pi * grid[k] * (data.times()[i] - t0);
      re += data.values()[i] * std::cos(phase);
      im += data.values()[i] * std::sin(phase);
    }
    est.psd_mean[k] = (re * re + im * im) / n;
  }
  return est;
}

}  // namespace bnse
