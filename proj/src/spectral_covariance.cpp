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

#include "bnse/error.hpp"
#include "bnse/spectrum.hpp"

namespace bnse {

namespace {

constexpr double kPi = std::numbers::pi;

std::atomic<bool> g_warned_approx{false};

void warn_if_invalid(const StationaryKernel& kernel, const WindowConfig& window) {
  if (!approximation_valid(kernel, window) && !g_warned_approx.exchange(true)) {
    spdlog::warn(
        "delta approximation used with alpha = {:.4g} outside its validity range "
        "(sqrt(alpha)/pi = {:.4g} > 0.1 x kernel frequency scale {:.4g})",
        window.alpha, std::sqrt(window.alpha) / kPi, kernel.frequency_scale());
  }
}

class ExactSMCovariance final : public SpectralCovariance {
 public:
  ExactSMCovariance(std::shared_ptr<const SMKernel> kernel, const WindowConfig& window)
      : kernel_(std::move(kernel)), window_(window), terms_(*kernel_, window) {}

  double prior(double xi, double xi_prime) const override {
    return prior_cov_exact_sm(*kernel_, window_, xi, xi_prime);
  }
  std::complex<double> cross(double t, double xi) const override {
    return cross_cov_exact_sm(*kernel_, terms_, t, xi);
  }
  SpectrumMode mode() const override { return SpectrumMode::exact_sm; }

 private:
  std::shared_ptr<const SMKernel> kernel_;
  WindowConfig window_;
  SMSpectralTerms terms_;
};

class DeltaApproxCovariance final : public SpectralCovariance {
 public:
  DeltaApproxCovariance(KernelPtr kernel, const WindowConfig& window)
      : kernel_(std::move(kernel)), window_(window) {
    warn_if_invalid(*kernel_, window_);
  }

  double prior(double xi, double xi_prime) const override {
    return prior_cov_approx(*kernel_, window_, xi, xi_prime);
  }
  std::complex<double> cross(double t, double xi) const override {
    return cross_cov_approx(*kernel_, window_, t, xi);
  }
  SpectrumMode mode() const override { return SpectrumMode::delta_approx; }

 private:
  KernelPtr kernel_;
  WindowConfig window_;
};

}  // namespace

void WindowConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InputError("window decay alpha must be strictly positive and finite");
  }
  if (!std::isfinite(centre)) throw InputError("window centre must be finite");
}

double WindowConfig::width() const { return 1.0 / std::sqrt(2.0 * alpha); }

WindowConfig WindowConfig::automatic(const TimeSeries& data) {
  const double half = 0.5 * data.span();
  if (!(half > 0.0)) {
    throw InputError("automatic window needs at least two distinct times; pass alpha explicitly");
  }
  return {1.0 / (2.0 * half * half), data.midpoint()};
}

SMSpectralTerms::SMSpectralTerms(const SMKernel& kernel, const WindowConfig& window) {
  window.validate();
  alpha_tilde = window.alpha / (kPi * kPi);
  for (const auto& c : kernel.components()) {
    const double g = c.gamma / (kPi * kPi);
    gamma_tilde.push_back(g);
    lq.push_back(1.0 / (1.0 / alpha_tilde + 1.0 / g));
  }
}

double prior_cov_exact_sm(const SMKernel& kernel, const WindowConfig& window, double xi,
                          double xi_prime) {
  const double a = window.alpha;
  const double diff = xi - xi_prime;
  const double mid = 0.5 * (xi + xi_prime);
  const double decay = std::exp(-kPi * kPi * diff * diff / (2.0 * a));
  double out = 0.0;
  for (const auto& c : kernel.components()) {
    const double b = a + 2.0 * c.gamma;
    const double scale = c.sigma2 * kPi / (2.0 * std::sqrt(a * b));
    const double dp = mid - c.theta;
    const double dm = mid + c.theta;
    out += scale * (std::exp(-2.0 * kPi * kPi * dp * dp / b) +
                    std::exp(-2.0 * kPi * kPi * dm * dm / b));
  }
  return out * decay;
}

double prior_cov_approx(const StationaryKernel& kernel, const WindowConfig& window, double xi,
                        double xi_prime) {
  warn_if_invalid(kernel, window);
  const double a = window.alpha;
  const double diff = xi - xi_prime;
  return std::sqrt(kPi / (2.0 * a)) * std::exp(-kPi * kPi * diff * diff / (2.0 * a)) *
         kernel.spectral_density(0.5 * (xi + xi_prime));
}

std::complex<double> cross_cov_exact_sm(const SMKernel& kernel, const SMSpectralTerms& terms,
                                        double t, double xi) {
  const auto& comps = kernel.components();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t q = 0; q < comps.size(); ++q) {
    const double sum = terms.alpha_tilde + terms.gamma_tilde[q];
    const double amp =
        comps[q].sigma2 / (2.0 * std::sqrt(kPi * sum)) * std::exp(-kPi * kPi * terms.lq[q] * t * t);
    for (double theta : {comps[q].theta, -comps[q].theta}) {
      const double d = xi - theta;
      const double mag = amp * std::exp(-d * d / sum);
      const double phase =
          -2.0 * kPi * t * terms.lq[q] * (theta / terms.gamma_tilde[q] + xi / terms.alpha_tilde);
      re += mag * std::cos(phase);
      im += mag * std::sin(phase);
    }
  }
  return {re, im};
}

std::complex<double> cross_cov_exact_sm(const SMKernel& kernel, const WindowConfig& window,
                                        double t, double xi) {
  return cross_cov_exact_sm(kernel, SMSpectralTerms(kernel, window), t, xi);
}

std::complex<double> cross_cov_approx(const StationaryKernel& kernel, const WindowConfig& window,
                                      double t, double xi) {
  warn_if_invalid(kernel, window);
  const double s = kernel.spectral_density(xi);
  const double phase = -2.0 * kPi * xi * t;
  return {s * std::cos(phase), s * std::sin(phase)};
}

bool approximation_valid(const StationaryKernel& kernel, const WindowConfig& window) {
  return std::sqrt(window.alpha) / kPi <= 0.1 * kernel.frequency_scale();
}

std::string to_string(SpectrumMode mode) {
  return mode == SpectrumMode::exact_sm ? "exact-sm" : "delta-approximation";
}

std::unique_ptr<SpectralCovariance> make_spectral_covariance(KernelPtr kernel,
                                                             const WindowConfig& window,
                                                             SpectrumMode mode) {
  window.validate();
  if (mode == SpectrumMode::exact_sm) {
    auto sm = std::dynamic_pointer_cast<const SMKernel>(kernel);
    if (!sm) {
      throw InputError("exact local-spectrum statistics need a spectral mixture kernel, got '" +
                       kernel->type_name() + "'");
    }
    return std::make_unique<ExactSMCovariance>(std::move(sm), window);
  }
  return std::make_unique<DeltaApproxCovariance>(std::move(kernel), window);
}

double pseudo_cov(const SpectralCovariance& cov, double xi, double xi_prime) {
  return cov.prior(xi, -xi_prime);
}

RealImagCov real_imag_covs(const SpectralCovariance& cov, double xi, double xi_prime) {
  const double k = cov.prior(xi, xi_prime);
  const double p = pseudo_cov(cov, xi, xi_prime);
  return {0.5 * (k + p), 0.5 * (k - p), 0.0};
}

}  // namespace bnse
