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
#include <string>
#include <vector>

namespace bnse {

// Frequency grid with per-frequency spectrum statistics. BNSE fills every
// column; point estimates (the baselines) leave the mean and variance
// columns at zero and report their power in psd_mean.
struct SpectrumEstimate {
  std::vector<double> grid;
  std::vector<double> mean_real;
  std::vector<double> mean_imag;
  std::vector<double> var_real;
  std::vector<double> var_imag;
  std::vector<double> psd_mean;
  std::string method;

  SpectrumEstimate() = default;
  SpectrumEstimate(std::vector<double> frequencies, std::string method_name);

  std::size_t size() const { return grid.size(); }

  // Equal lengths and psd_mean >= 0; throws InputError otherwise.
  void validate() const;

  // Standard deviation of the PSD at grid point i, treating the real and
  // imaginary parts as independent Gaussians:
  //   Var(X^2) = 2 v^2 + 4 m^2 v  for X ~ N(m, v).
  double psd_std(std::size_t i) const;
};

// Evenly spaced grid of `points` frequencies over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

}  // namespace bnse
