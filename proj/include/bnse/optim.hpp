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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bnse/exec.hpp"
#include "bnse/spectrum.hpp"

namespace bnse {

struct Bound {
  double lo;
  double hi;
};

struct PowellOptions {
  double ftol = 1e-12;  // stop when a full cycle improves f by less than this (relative)
  double xtol = 1e-9;   // absolute precision of each line search
  int max_iter = 200;   // direction-set cycles
  std::uint64_t seed = 0;  // orientation of the direction set after a reset
};

struct PowellResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Powell's conjugate-direction method inside a box. Each line search first
// brackets a minimum by expanding away from the current point, so the result
// stays in the basin of x0. Never returns a value worse than f(x0). A
// non-finite objective value throws NumericalError carrying the point.
PowellResult powell_minimize(const Objective& objective, std::vector<double> x0,
                             std::vector<Bound> bounds, const PowellOptions& options = {});

struct Peak {
  double frequency = 0.0;
  double psd = 0.0;
  bool at_boundary = false;  // converged onto an end of the search range
};

struct PeakOptions {
  std::size_t n_starts = 8;
  double tol = 1e-7;           // frequency tolerance; peaks closer than 10 tol merge
  std::size_t coarse_points = 400;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;  // restarts run concurrently
};

// Local maxima of the posterior-mean PSD over [lo, hi]: Powell runs on
// -psd_mean from the n_starts best coarse-grid local maxima, converged
// points within 10 tol are merged, and the list is sorted by PSD, largest
// first.
std::vector<Peak> find_psd_peaks(const SpectrumPosterior& posterior, Bound range,
                                 const PeakOptions& options = {});

}  // namespace bnse
