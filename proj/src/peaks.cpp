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

#include <spdlog/spdlog.h>

#include "bnse/error.hpp"
#include "bnse/optim.hpp"

namespace bnse {

std::vector<Peak> find_psd_peaks(const SpectrumPosterior& posterior, Bound range,
                                 const PeakOptions& options) {
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || !(range.lo < range.hi)) {
    throw InputError("peak search: frequency range must be finite with lo < hi");
  }
  if (options.n_starts < 1) throw InputError("peak search: n_starts must be >= 1");
  if (!(options.tol > 0.0)) throw InputError("peak search: tol must be positive");
  if (options.coarse_points < 3) throw InputError("peak search: coarse grid needs >= 3 points");

  const auto grid = linear_grid(range.lo, range.hi, options.coarse_points);
  const auto coarse = posterior.evaluate(grid, options.exec);
  const auto& p = coarse.psd_mean;
  const std::size_t m = grid.size();

  // Seeds: coarse local maxima, best first, topped up with the best
  // remaining grid points when there are fewer maxima than starts.
  std::vector<std::size_t> maxima, others;
  for (std::size_t i = 0; i < m; ++i) {
    const bool left = i == 0 || p[i] >= p[i - 1];
    const bool right = i + 1 == m || p[i] >= p[i + 1];
    (left && right ? maxima : others).push_back(i);
  }
  auto by_psd = [&](std::size_t a, std::size_t b) { return p[a] > p[b] || (p[a] == p[b] && a < b); };
  std::sort(maxima.begin(), maxima.end(), by_psd);
  std::sort(others.begin(), others.end(), by_psd);
  std::vector<std::size_t> seeds(maxima.begin(),
                                 maxima.begin() + std::min(maxima.size(), options.n_starts));
  for (std::size_t i = 0; seeds.size() < options.n_starts && i < others.size(); ++i) {
    seeds.push_back(others[i]);
  }

  PowellOptions powell;
  powell.xtol = 1e-3 * options.tol;
  powell.ftol = 1e-14;
  powell.seed = options.seed;
  const Objective negative_psd = [&](std::span<const double> x) {
    return -posterior.psd_mean(x[0]);
  };

  std::vector<Peak> found(seeds.size());
  for_each_index(static_cast<std::ptrdiff_t>(seeds.size()), options.exec, [&](std::ptrdiff_t k) {
    const auto r = powell_minimize(negative_psd, {grid[seeds[k]]}, {range}, powell);
    const double xi = r.x[0];
    const double edge = 10.0 * options.tol;
    found[k] = {xi, -r.f, xi - range.lo <= edge || range.hi - xi <= edge};
  });

  std::stable_sort(found.begin(), found.end(),
                   [](const Peak& a, const Peak& b) { return a.psd > b.psd; });
  std::vector<Peak> peaks;
  for (const auto& cand : found) {
    const bool duplicate = std::any_of(peaks.begin(), peaks.end(), [&](const Peak& kept) {
      return std::abs(kept.frequency - cand.frequency) <= 10.0 * options.tol;
    });
    if (!duplicate) peaks.push_back(cand);
  }
  spdlog::debug("peak search: {} starts, {} distinct peaks", seeds.size(), peaks.size());
  return peaks;
}

}  // namespace bnse
