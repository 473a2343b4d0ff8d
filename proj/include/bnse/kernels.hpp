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
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace bnse {

// Stationary covariance K(t, t') = K(t - t') together with its spectral
// density, the Fourier transform of K under the convention
//   density(xi) = \int K(tau) exp(-j 2 pi xi tau) dtau.
// Implementations are immutable and safe to share across threads.
class StationaryKernel {
 public:
  virtual ~StationaryKernel() = default;

  virtual double eval(double tau) const = 0;
  virtual double spectral_density(double xi) const = 0;

  // True only for the spectral mixture family, whose local-spectrum
  // statistics are available in closed form.
  virtual bool supports_exact_spectrum() const { return false; }

  // Smallest length-scale (in frequency) over which the spectral density
  // varies. The delta approximation of the windowed statistics is trusted
  // when the window's frequency spread is small relative to this.
  virtual double frequency_scale() const = 0;

  virtual std::string type_name() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

using KernelPtr = std::shared_ptr<const StationaryKernel>;

struct SMComponent {
  double sigma2 = 1.0;  // weight (variance)
  double gamma = 1.0;   // rate, inverse squared time
  double theta = 0.0;   // centre frequency, cycles per unit time
};

// Q-component spectral mixture:
//   K(tau) = sum_q sigma2_q exp(-gamma_q tau^2) cos(2 pi theta_q tau).
class SMKernel final : public StationaryKernel {
 public:
  explicit SMKernel(std::vector<SMComponent> components);
  SMKernel(double sigma2, double gamma, double theta)
      : SMKernel(std::vector<SMComponent>{{sigma2, gamma, theta}}) {}

  double eval(double tau) const override;
  double spectral_density(double xi) const override;
  bool supports_exact_spectrum() const override { return true; }
  double frequency_scale() const override;
  std::string type_name() const override { return "sm"; }
  nlohmann::json to_json() const override;

  const std::vector<SMComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  double variance() const;  // K(0)

 private:
  std::vector<SMComponent> components_;
};

// Squared exponential, K(tau) = sigma2 exp(-tau^2 / (2 l^2)). Equal to a
// single SM component with theta = 0 but served through the approximation
// path; use as_sm() for the exact one.
class SquaredExponentialKernel final : public StationaryKernel {
 public:
  SquaredExponentialKernel(double sigma2, double lengthscale);

  double eval(double tau) const override;
  double spectral_density(double xi) const override;
  double frequency_scale() const override;
  std::string type_name() const override { return "se"; }
  nlohmann::json to_json() const override;

  SMKernel as_sm() const;
  double sigma2() const { return sigma2_; }
  double lengthscale() const { return lengthscale_; }

 private:
  double sigma2_;
  double lengthscale_;
};

// Matern family for nu in {1/2, 3/2, 5/2}; nu = 1/2 is the Laplace kernel
// sigma2 exp(-|tau| / l).
class MaternKernel final : public StationaryKernel {
 public:
  MaternKernel(double nu, double sigma2, double lengthscale);

  double eval(double tau) const override;
  double spectral_density(double xi) const override;
  double frequency_scale() const override;
  std::string type_name() const override { return "matern"; }
  nlohmann::json to_json() const override;

  double nu() const { return nu_; }

 private:
  double nu_;
  double sigma2_;
  double lengthscale_;
  double density_norm_;
};

// Band-limited kernel K(tau) = sigma2 sinc(2 B tau), sinc(x) = sin(pi x)/(pi x),
// whose density is flat, sigma2 / (2 B), on |xi| < B.
class SincKernel final : public StationaryKernel {
 public:
  SincKernel(double sigma2, double bandwidth);

  double eval(double tau) const override;
  double spectral_density(double xi) const override;
  double frequency_scale() const override { return bandwidth_; }
  std::string type_name() const override { return "sinc"; }
  nlohmann::json to_json() const override;

 private:
  double sigma2_;
  double bandwidth_;
};

// White noise: K(tau) = sigma2 at tau = 0 and 0 elsewhere, with constant
// density sigma2. Gram matrices on distinct times are sigma2 * I. A zero
// variance is allowed and gives the identically-zero kernel.
class WhiteKernel final : public StationaryKernel {
 public:
  explicit WhiteKernel(double sigma2 = 1.0);

  double eval(double tau) const override;
  double spectral_density(double) const override { return sigma2_; }
  double frequency_scale() const override;
  std::string type_name() const override { return "white"; }
  nlohmann::json to_json() const override;

 private:
  double sigma2_;
};

// Observation noise variance, added on the Gram diagonal only.
struct NoiseModel {
  double sigma2 = 0.0;
  void validate() const;
};

// A kernel together with its noise model, the unit that serializes as
//   {"type":"sm","components":[{"sigma2":..,"gamma":..,"theta":..}],
//    "noise_sigma2":..}
struct KernelSpec {
  KernelPtr kernel;
  NoiseModel noise;
};

KernelSpec kernel_spec_from_json(const nlohmann::json& doc);
nlohmann::json kernel_spec_to_json(const KernelSpec& spec);

// Reads a spec either from a JSON file path or from inline JSON text.
KernelSpec load_kernel_spec(const std::string& path_or_json);

}  // namespace bnse
