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

#include <atomic>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnse/exec.hpp"
#include "bnse/gp.hpp"
#include "bnse/kernels.hpp"
#include "bnse/spectrum_estimate.hpp"
#include "bnse/time_series.hpp"

namespace bnse {

// Local spectrum of the signal around `centre`:
//   F_c(xi) = \int f(c + s) exp(-alpha s^2) exp(-j 2 pi xi s) ds.
// Window width is 1 / sqrt(2 alpha).
struct WindowConfig {
  double alpha = 1.0;
  double centre = 0.0;

  void validate() const;
  double width() const;

  // alpha = 1 / (2 (span/2)^2): a window as wide as half the data span,
  // centred on the data midpoint.
  static WindowConfig automatic(const TimeSeries& data);
};

// Per-component constants of the closed-form SM statistics:
//   alpha~ = alpha / pi^2,  gamma~_q = gamma_q / pi^2,
//   L_q = (1/alpha~ + 1/gamma~_q)^-1.
struct SMSpectralTerms {
  double alpha_tilde = 0.0;
  std::vector<double> gamma_tilde;
  std::vector<double> lq;

  SMSpectralTerms(const SMKernel& kernel, const WindowConfig& window);
};

// Prior covariance K_F(xi, xi') of the local spectrum for an SM kernel:
//   sum_q sum_{theta=+-theta_q} sigma2_q pi / (2 sqrt(alpha (alpha + 2 gamma_q)))
//     exp(-pi^2 (xi - xi')^2 / (2 alpha))
//     exp(-2 pi^2 ((xi + xi')/2 - theta)^2 / (alpha + 2 gamma_q)).
double prior_cov_exact_sm(const SMKernel& kernel, const WindowConfig& window, double xi,
                          double xi_prime);

// Delta approximation for any kernel with a spectral density, valid for
// small alpha:
//   sqrt(pi / (2 alpha)) exp(-pi^2 (xi - xi')^2 / (2 alpha)) S((xi + xi') / 2).
// Logs a warning (once per process) outside the validity threshold.
double prior_cov_approx(const StationaryKernel& kernel, const WindowConfig& window, double xi,
                        double xi_prime);

// Cross-covariance E[y(t) F_c(xi)] for an SM kernel, t relative to the
// centre:
//   sum_q sum_{theta=+-theta_q} sigma2_q / (2 sqrt(pi (alpha~ + gamma~_q)))
//     exp(-(xi - theta)^2 / (alpha~ + gamma~_q)) exp(-pi^2 L_q t^2)
//     exp(-j 2 pi t L_q (theta / gamma~_q + xi / alpha~)).
std::complex<double> cross_cov_exact_sm(const SMKernel& kernel, const SMSpectralTerms& terms,
                                        double t, double xi);
std::complex<double> cross_cov_exact_sm(const SMKernel& kernel, const WindowConfig& window,
                                        double t, double xi);

// Delta approximation S(xi) exp(-j 2 pi xi t), t relative to the centre.
std::complex<double> cross_cov_approx(const StationaryKernel& kernel, const WindowConfig& window,
                                      double t, double xi);

// The delta approximation is accepted when sqrt(alpha)/pi <= 0.1 times the
// kernel's frequency scale, i.e. alpha <= 0.01 gamma for SM kernels.
bool approximation_valid(const StationaryKernel& kernel, const WindowConfig& window);

enum class SpectrumMode { exact_sm, delta_approx };
std::string to_string(SpectrumMode mode);

// Prior second-order statistics of the local spectrum.
class SpectralCovariance {
 public:
  virtual ~SpectralCovariance() = default;
  // K_F(xi, xi') = E[F(xi) F*(xi')], real for real-valued signals.
  virtual double prior(double xi, double xi_prime) const = 0;
  // E[y(t) F(xi)], t relative to the window centre.
  virtual std::complex<double> cross(double t, double xi) const = 0;
  virtual SpectrumMode mode() const = 0;
};

std::unique_ptr<SpectralCovariance> make_spectral_covariance(KernelPtr kernel,
                                                             const WindowConfig& window,
                                                             SpectrumMode mode);

// Pseudo-covariance P_F(xi, xi') = E[F(xi) F(xi')] = K_F(xi, -xi').
double pseudo_cov(const SpectralCovariance& cov, double xi, double xi_prime);

struct RealImagCov {
  double rr = 0.0;  // Cov(Re F(xi), Re F(xi'))
  double ii = 0.0;  // Cov(Im F(xi), Im F(xi'))
  double ri = 0.0;  // Cov(Re F(xi), Im F(xi')); zero a priori
};

// K_rr = (K_F(xi,xi') + K_F(xi,-xi')) / 2, K_ii = (K_F(xi,xi') - K_F(xi,-xi')) / 2.
RealImagCov real_imag_covs(const SpectralCovariance& cov, double xi, double xi_prime);

struct SpectralMean {
  double re = 0.0;
  double im = 0.0;
};

// Posterior law of the local spectrum given the observations of a TrainedGP.
// The real vector (y, Re F, Im F) is jointly Gaussian with cross-covariances
// Re/Im of cross(); conditioning on y gives
//   mean_re = Re(k)^T G^-1 y,           mean_im = Im(k)^T G^-1 y,
//   cov_rr  = K_rr - Re(k)^T G^-1 Re(k'),  cov_ii = K_ii - Im(k)^T G^-1 Im(k'),
// k = [cross(t_i - c, xi)]_i. The mean costs O(N) per frequency, the
// covariance O(N^2) (one triangular solve).
//
// Immutable after construction; every query may run concurrently. Several
// posteriors (different windows) can share one TrainedGP and therefore one
// Gram factorization.
class SpectrumPosterior {
 public:
  // Mode defaults to exact_sm for SM kernels, delta_approx otherwise.
  SpectrumPosterior(std::shared_ptr<const TrainedGP> gp, WindowConfig window,
                    std::optional<SpectrumMode> mode = std::nullopt);

  // No observations: the posterior is the prior.
  static SpectrumPosterior prior_only(KernelPtr kernel, WindowConfig window,
                                      std::optional<SpectrumMode> mode = std::nullopt);

  const WindowConfig& window() const { return window_; }
  SpectrumMode mode() const { return cov_->mode(); }
  const SpectralCovariance& prior() const { return *cov_; }
  std::size_t observations() const { return static_cast<std::size_t>(times_rel_.size()); }

  SpectralMean mean(double xi) const;
  RealImagCov cov(double xi, double xi_prime) const;

  // Posterior variances of Re F(xi) and Im F(xi). Values in
  // [-1e-10 * prior, 0) are clamped to zero and counted; anything lower
  // throws NumericalError.
  RealImagCov variance(double xi) const;

  // E[|F(xi)|^2 | y] = mean_re^2 + mean_im^2 + var_re + var_im.
  double psd_mean(double xi) const;

  SpectrumEstimate evaluate(std::span<const double> grid, Exec exec = Exec::parallel) const;

  struct GridCovariance {
    Eigen::MatrixXd rr;
    Eigen::MatrixXd ii;
    Eigen::VectorXd mean_re;
    Eigen::VectorXd mean_im;
  };
  GridCovariance grid_covariance(std::span<const double> grid, Exec exec = Exec::parallel) const;

  std::size_t clamped_variances() const { return clamped_->load(); }

 private:
  SpectrumPosterior(std::shared_ptr<const TrainedGP> gp, KernelPtr kernel, WindowConfig window,
                    std::optional<SpectrumMode> mode);

  // Re and Im of k = [cross(t_i - c, xi)]_i.
  void cross_vectors(double xi, Eigen::VectorXd& re, Eigen::VectorXd& im) const;
  double clamp_variance(double value, double scale, const char* part, double xi) const;

  std::shared_ptr<const TrainedGP> gp_;
  WindowConfig window_;
  std::shared_ptr<const SpectralCovariance> cov_;
  Eigen::VectorXd times_rel_;
  std::shared_ptr<std::atomic<std::size_t>> clamped_;
};

// Draws n_samples PSD paths on `grid`: Re F and Im F are sampled
// independently from their M-dimensional posterior Gaussians and the result
// is re^2 + im^2 (rows are draws). Covariances get the Gram jitter policy
// relative to their mean diagonal; failure names the grid.
Eigen::MatrixXd sample_psd(const SpectrumPosterior& posterior, std::span<const double> grid,
                           std::size_t n_samples, std::uint64_t seed);

// Real and imaginary spectrum paths, as used by sample_psd.
struct SpectrumDraws {
  Eigen::MatrixXd re;  // n_samples x M
  Eigen::MatrixXd im;
};
SpectrumDraws sample_spectrum(const SpectrumPosterior& posterior, std::span<const double> grid,
                              std::size_t n_samples, std::uint64_t seed);

// sum_i exp(-j 2 pi xi t_i) y_i: the posterior mean in the limit of an
// infinitely wide window and a white prior.
std::complex<double> dtft_limit_mean(const TimeSeries& data, double xi);

// Default frequency grid: `points` frequencies on [0, N / (2 span)].
std::vector<double> default_grid(const TimeSeries& data, std::size_t points = 1000);

}  // namespace bnse
