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

#include "bnse/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <spdlog/spdlog.h>

#include "bnse/error.hpp"

namespace bnse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClampTolerance = 1e-10;

SpectrumMode default_mode(const StationaryKernel& kernel) {
  return kernel.supports_exact_spectrum() ? SpectrumMode::exact_sm : SpectrumMode::delta_approx;
}

}  // namespace

SpectrumEstimate::SpectrumEstimate(std::vector<double> frequencies, std::string method_name)
    : grid(std::move(frequencies)),
      mean_real(grid.size(), 0.0),
      mean_imag(grid.size(), 0.0),
      var_real(grid.size(), 0.0),
      var_imag(grid.size(), 0.0),
      psd_mean(grid.size(), 0.0),
      method(std::move(method_name)) {}

void SpectrumEstimate::validate() const {
  const auto n = grid.size();
  if (mean_real.size() != n || mean_imag.size() != n || var_real.size() != n ||
      var_imag.size() != n || psd_mean.size() != n) {
    throw InputError("spectrum estimate: columns differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(psd_mean[i] >= 0.0)) {
      throw InputError("spectrum estimate: negative or NaN psd_mean at row " + std::to_string(i));
    }
  }
}

double SpectrumEstimate::psd_std(std::size_t i) const {
  const double vr = var_real[i];
  const double vi = var_imag[i];
  const double mr = mean_real[i];
  const double mi = mean_imag[i];
  return std::sqrt(2.0 * vr * vr + 4.0 * mr * mr * vr + 2.0 * vi * vi + 4.0 * mi * mi * vi);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {lo};
  std::vector<double> g(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

std::vector<double> default_grid(const TimeSeries& data, std::size_t points) {
  if (data.size() < 2) throw InputError("default grid needs at least two observations");
  const double nu = static_cast<double>(data.size()) / (2.0 * data.span());
  return linear_grid(0.0, nu, points);
}

SpectrumPosterior::SpectrumPosterior(std::shared_ptr<const TrainedGP> gp, WindowConfig window,
                                     std::optional<SpectrumMode> mode)
    : SpectrumPosterior(gp, gp ? gp->kernel_ptr() : nullptr, window, mode) {}

SpectrumPosterior::SpectrumPosterior(std::shared_ptr<const TrainedGP> gp, KernelPtr kernel,
                                     WindowConfig window, std::optional<SpectrumMode> mode)
    : gp_(std::move(gp)),
      window_(window),
      clamped_(std::make_shared<std::atomic<std::size_t>>(0)) {
  if (!kernel) throw InputError("spectrum posterior needs a kernel");
  window_.validate();
  cov_ = make_spectral_covariance(kernel, window_, mode.value_or(default_mode(*kernel)));
  if (gp_) {
    const auto& t = gp_->data().times();
    times_rel_.resize(static_cast<Eigen::Index>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i) {
      times_rel_(static_cast<Eigen::Index>(i)) = t[i] - window_.centre;
    }
    const double reach = times_rel_.size() > 0 ? times_rel_.cwiseAbs().maxCoeff() : 0.0;
    if (cov_->mode() == SpectrumMode::delta_approx && reach > window_.width()) {
      spdlog::warn(
          "delta approximation: observations reach {:.4g} from the window centre but the "
          "window width is {:.4g}; posterior variances may be inconsistent (decrease alpha)",
          reach, window_.width());
    }
  }
}

SpectrumPosterior SpectrumPosterior::prior_only(KernelPtr kernel, WindowConfig window,
                                                std::optional<SpectrumMode> mode) {
  return SpectrumPosterior(nullptr, std::move(kernel), window, mode);
}

void SpectrumPosterior::cross_vectors(double xi, Eigen::VectorXd& re, Eigen::VectorXd& im) const {
  const auto n = times_rel_.size();
  re.resize(n);
  im.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = cov_->cross(times_rel_(i), xi);
    re(i) = k.real();
    im(i) = k.imag();
  }
}

SpectralMean SpectrumPosterior::mean(double xi) const {
  if (!gp_) return {};
  Eigen::VectorXd re, im;
  cross_vectors(xi, re, im);
  return {re.dot(gp_->weights()), im.dot(gp_->weights())};
}

RealImagCov SpectrumPosterior::cov(double xi, double xi_prime) const {
  RealImagCov out = real_imag_covs(*cov_, xi, xi_prime);
  if (!gp_) return out;
  Eigen::VectorXd re1, im1, re2, im2;
  cross_vectors(xi, re1, im1);
  cross_vectors(xi_prime, re2, im2);
  const auto l = gp_->cholesky().matrixL();
  l.solveInPlace(re1);
  l.solveInPlace(im1);
  l.solveInPlace(re2);
  l.solveInPlace(im2);
  out.rr -= re1.dot(re2);
  out.ii -= im1.dot(im2);
  out.ri = -re1.dot(im2);
  return out;
}

double SpectrumPosterior::clamp_variance(double value, double scale, const char* part,
                                         double xi) const {
  if (value >= 0.0) return value;
  const double tolerance = std::max(kClampTolerance * scale, 1e-290);
  if (value >= -tolerance) {
    clamped_->fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  std::ostringstream msg;
  msg << "posterior variance of " << part << " F at xi = " << xi << " is " << value
      << " (prior variance K_F = " << scale << ")";
  if (cov_->mode() == SpectrumMode::delta_approx) {
    msg << "; the delta approximation needs a window wider than the data, decrease alpha";
  } else {
    msg << "; the Gram factorization is inaccurate";
  }
  throw NumericalError(msg.str());
}

RealImagCov SpectrumPosterior::variance(double xi) const {
  const RealImagCov prior = real_imag_covs(*cov_, xi, xi);
  if (!gp_) return prior;
  Eigen::VectorXd re, im;
  cross_vectors(xi, re, im);
  const auto l = gp_->cholesky().matrixL();
  l.solveInPlace(re);
  l.solveInPlace(im);
  RealImagCov out;
  // Im F has zero prior variance at xi = 0, so the tolerance is scaled by
  // the total prior variance K_F(xi, xi).
  const double scale = prior.rr + prior.ii;
  out.rr = clamp_variance(prior.rr - re.squaredNorm(), scale, "Re", xi);
  out.ii = clamp_variance(prior.ii - im.squaredNorm(), scale, "Im", xi);
  out.ri = -re.dot(im);
  return out;
}

double SpectrumPosterior::psd_mean(double xi) const {
  const auto m = mean(xi);
  const auto v = variance(xi);
  return m.re * m.re + m.im * m.im + v.rr + v.ii;
}

SpectrumEstimate SpectrumPosterior::evaluate(std::span<const double> grid, Exec exec) const {
  SpectrumEstimate est(std::vector<double>(grid.begin(), grid.end()), "bnse");
  for_each_index(static_cast<std::ptrdiff_t>(grid.size()), exec, [&](std::ptrdiff_t i) {
    const auto m = mean(grid[i]);
    const auto v = variance(grid[i]);
    est.mean_real[i] = m.re;
    est.mean_imag[i] = m.im;
    est.var_real[i] = v.rr;
    est.var_imag[i] = v.ii;
    est.psd_mean[i] = m.re * m.re + m.im * m.im + v.rr + v.ii;
  });
  return est;
}

SpectrumPosterior::GridCovariance SpectrumPosterior::grid_covariance(std::span<const double> grid,
                                                                     Exec exec) const {
  const auto m = static_cast<Eigen::Index>(grid.size());
  const auto n = times_rel_.size();
  GridCovariance out{Eigen::MatrixXd(m, m), Eigen::MatrixXd(m, m), Eigen::VectorXd::Zero(m),
                     Eigen::VectorXd::Zero(m)};
  for_each_index(m, exec, [&](std::ptrdiff_t j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const auto c = real_imag_covs(*cov_, grid[i], grid[j]);
      out.rr(i, j) = c.rr;
      out.ii(i, j) = c.ii;
    }
  });
  if (gp_) {
    Eigen::MatrixXd kre(n, m), kim(n, m);
    for_each_index(m, exec, [&](std::ptrdiff_t j) {
      Eigen::VectorXd re, im;
      cross_vectors(grid[j], re, im);
      kre.col(j) = re;
      kim.col(j) = im;
    });
    out.mean_re = kre.transpose() * gp_->weights();
    out.mean_im = kim.transpose() * gp_->weights();
    const auto l = gp_->cholesky().matrixL();
    l.solveInPlace(kre);
    l.solveInPlace(kim);
    const Eigen::MatrixXd qre = kre.transpose() * kre;
    const Eigen::MatrixXd qim = kim.transpose() * kim;
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        out.rr(i, j) -= qre(i, j);
        out.ii(i, j) -= qim(i, j);
      }
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j + 1; i < m; ++i) {
      out.rr(i, j) = out.rr(j, i);
      out.ii(i, j) = out.ii(j, i);
    }
  }
  return out;
}

std::complex<double> dtft_limit_mean(const TimeSeries& data, double xi) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double phase = -2.0 * kPi * xi * data.times()[i];
    re += data.values()[i] * std::cos(phase);
    im += data.values()[i] * std::sin(phase);
  }
  return {re, im};
}

}  // namespace bnse
