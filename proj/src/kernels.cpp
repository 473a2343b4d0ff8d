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

#include "bnse/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bnse/error.hpp"

namespace bnse {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InputError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

SMKernel::SMKernel(std::vector<SMComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw InputError("spectral mixture kernel needs at least one component");
  }
  for (const auto& c : components_) {
    require_positive(c.sigma2, "SM weight sigma2");
    require_positive(c.gamma, "SM rate gamma");
    if (!(c.theta >= 0.0) || !std::isfinite(c.theta)) {
      throw InputError("SM frequency theta must be nonnegative and finite");
    }
  }
}

double SMKernel::eval(double tau) const {
  double k = 0.0;
  for (const auto& c : components_) {
    k += c.sigma2 * std::exp(-c.gamma * tau * tau) * std::cos(2.0 * kPi * c.theta * tau);
  }
  return k;
}

double SMKernel::spectral_density(double xi) const {
  double s = 0.0;
  for (const auto& c : components_) {
    const double scale = 0.5 * c.sigma2 * std::sqrt(kPi / c.gamma);
    const double dp = xi - c.theta;
    const double dm = xi + c.theta;
    s += scale * (std::exp(-kPi * kPi * dp * dp / c.gamma) +
                  std::exp(-kPi * kPi * dm * dm / c.gamma));
  }
  return s;
}

double SMKernel::frequency_scale() const {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) g = std::min(g, c.gamma);
  return std::sqrt(g) / kPi;
}

double SMKernel::variance() const {
  double v = 0.0;
  for (const auto& c : components_) v += c.sigma2;
  return v;
}

nlohmann::json SMKernel::to_json() const {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : components_) {
    comps.push_back({{"sigma2", c.sigma2}, {"gamma", c.gamma}, {"theta", c.theta}});
  }
  return {{"type", "sm"}, {"components", comps}};
}

SquaredExponentialKernel::SquaredExponentialKernel(double sigma2, double lengthscale)
    : sigma2_(sigma2), lengthscale_(lengthscale) {
  require_positive(sigma2, "SE variance");
  require_positive(lengthscale, "SE lengthscale");
}

double SquaredExponentialKernel::eval(double tau) const {
  return sigma2_ * std::exp(-0.5 * tau * tau / (lengthscale_ * lengthscale_));
}

double SquaredExponentialKernel::spectral_density(double xi) const {
  const double gamma = 0.5 / (lengthscale_ * lengthscale_);
  return sigma2_ * std::sqrt(kPi / gamma) * std::exp(-kPi * kPi * xi * xi / gamma);
}

double SquaredExponentialKernel::frequency_scale() const {
  return std::sqrt(0.5 / (lengthscale_ * lengthscale_)) / kPi;
}

nlohmann::json SquaredExponentialKernel::to_json() const {
  return {{"type", "se"}, {"sigma2", sigma2_}, {"lengthscale", lengthscale_}};
}

SMKernel SquaredExponentialKernel::as_sm() const {
  return SMKernel(sigma2_, 0.5 / (lengthscale_ * lengthscale_), 0.0);
}

MaternKernel::MaternKernel(double nu, double sigma2, double lengthscale)
    : nu_(nu), sigma2_(sigma2), lengthscale_(lengthscale) {
  if (nu != 0.5 && nu != 1.5 && nu != 2.5) {
    throw InputError("Matern smoothness nu must be 0.5, 1.5 or 2.5");
  }
  require_positive(sigma2, "Matern variance");
  require_positive(lengthscale, "Matern lengthscale");
  // S(xi) = sigma2 * 2 sqrt(pi) Gamma(nu + 1/2) / Gamma(nu) * lambda^(2 nu)
  //         * (lambda^2 + 4 pi^2 xi^2)^-(nu + 1/2),  lambda^2 = 2 nu / l^2
  const double lambda2 = 2.0 * nu / (lengthscale * lengthscale);
  density_norm_ = sigma2 * 2.0 * std::sqrt(kPi) * std::tgamma(nu + 0.5) / std::tgamma(nu) *
                  std::pow(lambda2, nu);
}

double MaternKernel::eval(double tau) const {
  const double r = std::abs(tau) / lengthscale_;
  if (nu_ == 0.5) return sigma2_ * std::exp(-r);
  if (nu_ == 1.5) {
    const double s = std::sqrt(3.0) * r;
    return sigma2_ * (1.0 + s) * std::exp(-s);
  }
  const double s = std::sqrt(5.0) * r;
  return sigma2_ * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double MaternKernel::spectral_density(double xi) const {
  const double lambda2 = 2.0 * nu_ / (lengthscale_ * lengthscale_);
  return density_norm_ * std::pow(lambda2 + 4.0 * kPi * kPi * xi * xi, -(nu_ + 0.5));
}

double MaternKernel::frequency_scale() const {
  return std::sqrt(2.0 * nu_) / (2.0 * kPi * lengthscale_);
}

nlohmann::json MaternKernel::to_json() const {
  return {{"type", "matern"}, {"nu", nu_}, {"sigma2", sigma2_}, {"lengthscale", lengthscale_}};
}

SincKernel::SincKernel(double sigma2, double bandwidth)
    : sigma2_(sigma2), bandwidth_(bandwidth) {
  require_positive(sigma2, "sinc variance");
  require_positive(bandwidth, "sinc bandwidth");
}

double SincKernel::eval(double tau) const {
  const double x = 2.0 * bandwidth_ * tau;
  if (std::abs(x) < 1e-12) return sigma2_;
  return sigma2_ * std::sin(kPi * x) / (kPi * x);
}

double SincKernel::spectral_density(double xi) const {
  const double a = std::abs(xi);
  if (a < bandwidth_) return sigma2_ / (2.0 * bandwidth_);
  if (a == bandwidth_) return sigma2_ / (4.0 * bandwidth_);
  return 0.0;
}

nlohmann::json SincKernel::to_json() const {
  return {{"type", "sinc"}, {"sigma2", sigma2_}, {"bandwidth", bandwidth_}};
}

WhiteKernel::WhiteKernel(double sigma2) : sigma2_(sigma2) {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw InputError("white kernel variance must be nonnegative and finite");
  }
}

double WhiteKernel::eval(double tau) const { return tau == 0.0 ? sigma2_ : 0.0; }

double WhiteKernel::frequency_scale() const { return std::numeric_limits<double>::infinity(); }

nlohmann::json WhiteKernel::to_json() const { return {{"type", "white"}, {"sigma2", sigma2_}}; }

void NoiseModel::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw InputError("noise variance must be nonnegative and finite");
  }
}

}  // namespace bnse
