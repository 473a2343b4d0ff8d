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

#include <Eigen/Eigenvalues>

#include "bnse/baselines.hpp"
#include "bnse/error.hpp"

namespace bnse {

void MUSICConfig::validate(std::size_t n) const {
  if (order < 1) throw InputError("MUSIC: model order must be >= 1");
  if (embedding <= order) throw InputError("MUSIC: embedding dimension must exceed the order");
  if (static_cast<std::size_t>(embedding) > n / 2) {
    throw InputError("MUSIC: embedding dimension must be at most N/2 (" + std::to_string(n / 2) +
                     ")");
  }
}

SpectrumEstimate music(const TimeSeries& data, const MUSICConfig& config,
                       std::span<const double> grid) {
  if (data.size() < 4 || !data.is_uniform(1e-9)) {
    throw InputError("MUSIC requires at least 4 uniformly sampled observations");
  }
  config.validate(data.size());
  const auto& y = data.values();
  const auto m = static_cast<Eigen::Index>(config.embedding);
  const auto snapshots = static_cast<Eigen::Index>(data.size()) - m + 1;

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < snapshots; ++k) {
    const Eigen::Map<const Eigen::VectorXd> x(y.data() + k, m);
    r.noalias() += x * x.transpose();
  }
  r /= static_cast<double>(snapshots);
  // Forward-backward average: (R + J R^* J) / 2, R real here.
  const Eigen::MatrixXd flipped = r.reverse();
  r = 0.5 * (r + flipped);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
  if (eig.info() != Eigen::Success) throw NumericalError("MUSIC: eigendecomposition failed");
  // Eigenvalues ascend; the first m - p vectors span the noise subspace.
  const Eigen::MatrixXd noise = eig.eigenvectors().leftCols(m - config.order);

  const double dt = data.mean_spacing();
  SpectrumEstimate est(std::vector<double>(grid.begin(), grid.end()), "music");
  Eigen::VectorXd c(m), s(m);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double phase = 2.0 * std::numbers::pi * grid[g] * dt * static_cast<double>(k);
      c(k) = std::cos(phase);
      s(k) = std::sin(phase);
    }
    const double proj = (noise.transpose() * c).squaredNorm() + (noise.transpose() * s).squaredNorm();
    est.psd_mean[g] = proj > 1.0 / kMusicCeiling ? 1.0 / proj : kMusicCeiling;
  }
  return est;
}

}  // namespace bnse
