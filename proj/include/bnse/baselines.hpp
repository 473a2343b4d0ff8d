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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bnse/exec.hpp"
#include "bnse/spectrum_estimate.hpp"
#include "bnse/time_series.hpp"

namespace bnse {

enum class LSNormalization {
  none,      // 1/2 (YC^2/CC + YS^2/SS): equals |DFT|^2 / N at Fourier frequencies
  standard,  // (YC^2/CC + YS^2/SS) / YY, in [0, 1]
  density,   // `none` scaled by dt^2 N, dt = span / (N - 1): the units of
             // |continuous Fourier transform|^2, comparable to BNSE's PSD
};

struct LSConfig {
  std::vector<double> grid;  // nonnegative, increasing
  bool fit_mean = true;      // floating-mean (generalized) fit
  LSNormalization normalization = LSNormalization::none;
  Exec exec = Exec::parallel;

  void validate() const;
};

// Lomb-Scargle periodogram with the Scargle phase shift tau(xi) that makes
// the sine and cosine columns orthogonal. The power goes in psd_mean; the
// variance columns are zero. Frequencies whose design columns both vanish
// get power 0 and a logged warning.
SpectrumEstimate lomb_scargle(const TimeSeries& data, const LSConfig& config);

// Periodogram |DFT|^2 / N on the FFT grid of the (optionally zero-padded)
// uniform series, keeping bins 0 .. floor(M/2) of the M-point transform,
// M = zero_pad_factor * N. Throws InputError on non-uniform sampling.
SpectrumEstimate periodogram(const TimeSeries& data, int zero_pad_factor = 1);

// The same quantity, |sum_i y_i exp(-j 2 pi xi t_i)|^2 / N, evaluated
// directly at arbitrary frequencies (uniform sampling required).
SpectrumEstimate periodogram_at(const TimeSeries& data, std::span<const double> grid);

struct MUSICConfig {
  int order = 4;       // number of complex exponentials (2 per real tone)
  int embedding = 40;  // snapshot dimension m

  void validate(std::size_t n) const;
};

inline constexpr double kMusicCeiling = 1e12;

// MUSIC pseudospectrum 1 / ||E_n^H a(xi)||^2 from the forward-backward
// averaged m x m autocorrelation, capped at kMusicCeiling.
SpectrumEstimate music(const TimeSeries& data, const MUSICConfig& config,
                       std::span<const double> grid);

}  // namespace bnse
