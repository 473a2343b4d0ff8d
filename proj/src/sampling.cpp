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
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <spdlog/spdlog.h>

#include "bnse/error.hpp"
#include "bnse/spectrum.hpp"

namespace bnse {

namespace {

// Lower Cholesky factor of a covariance on a frequency grid. The matrix is
// scaled to unit diagonal first, so the jitter (escalating from 1e-10 to
// 1e-4) is relative to each variance and does not swamp frequencies whose
// posterior variance is many orders below the peak. Zero-variance rows give
// zero rows in the factor.
Eigen::MatrixXd grid_factor(const Eigen::MatrixXd& cov, std::span<const double> grid,
                            const char* part) {
  const auto m = cov.rows();
  Eigen::VectorXd d(m);
  for (Eigen::Index i = 0; i < m; ++i) d(i) = cov(i, i) > 0.0 ? std::sqrt(cov(i, i)) : 0.0;
  if (m == 0 || d.maxCoeff() == 0.0) return Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd corr(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      corr(i, j) = d(i) > 0.0 && d(j) > 0.0 ? cov(i, j) / (d(i) * d(j)) : (i == j ? 1.0 : 0.0);
    }
  }
  double added = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double rel = kJitterStart; rel <= kJitterMax * (1.0 + 1e-9); rel *= 10.0) {
    corr.diagonal().array() += rel - added;
    added = rel;
    llt.compute(corr);
    if (llt.info() == Eigen::Success) {
      if (rel > kJitterStart) {
        spdlog::info("{} spectrum covariance needed jitter {:.3g} x each variance", part, rel);
      }
      return d.asDiagonal() * Eigen::MatrixXd(llt.matrixL());
    }
  }
  std::ostringstream msg;
  msg << part << " posterior spectrum covariance is not positive definite on the grid ["
      << grid.front() << ", " << grid.back() << "] with " << grid.size()
      << " points, even with jitter";
  throw NumericalError(msg.str());
}

}  // namespace

SpectrumDraws sample_spectrum(const SpectrumPosterior& posterior, std::span<const double> grid,
                              std::size_t n_samples, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  const auto n = static_cast<Eigen::Index>(n_samples);
  if (n_samples == 0 || grid.empty()) {
    return {Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m)};
  }
  const auto cov = posterior.grid_covariance(grid);
  const Eigen::MatrixXd lre = grid_factor(cov.rr, grid, "Re");
  const Eigen::MatrixXd lim = grid_factor(cov.ii, grid, "Im");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd zre(m, n), zim(m, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) zre(i, s) = normal(rng);
    for (Eigen::Index i = 0; i < m; ++i) zim(i, s) = normal(rng);
  }
  SpectrumDraws out;
  out.re = (lre * zre).transpose();
  out.im = (lim * zim).transpose();
  out.re.rowwise() += cov.mean_re.transpose();
  out.im.rowwise() += cov.mean_im.transpose();
  return out;
}

Eigen::MatrixXd sample_psd(const SpectrumPosterior& posterior, std::span<const double> grid,
                           std::size_t n_samples, std::uint64_t seed) {
  const auto draws = sample_spectrum(posterior, grid, n_samples, seed);
  return draws.re.array().square() + draws.im.array().square();
}

}  // namespace bnse
