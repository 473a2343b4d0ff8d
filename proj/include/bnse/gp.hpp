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
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "bnse/exec.hpp"
#include "bnse/kernels.hpp"
#include "bnse/time_series.hpp"
#include "json.hpp"

namespace bnse {

// Jitter escalation for Gram factorizations: start at kJitterStart * K(0),
// multiply by ten until kJitterMax * K(0).
inline constexpr double kJitterStart = 1e-10;
inline constexpr double kJitterMax = 1e-4;

// M[i][j] = K(t_i - t_j) + (noise + jitter) * [i == j].
Eigen::MatrixXd kernel_gram(const StationaryKernel& kernel, const NoiseModel& noise,
                            std::span<const double> times, double jitter = 0.0,
                            Exec exec = Exec::parallel);

struct GramFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // absolute jitter that made the factorization succeed
};

// Cholesky of the Gram matrix under the jitter policy. Throws NumericalError
// when the largest jitter still fails.
GramFactor factorize_gram(const StationaryKernel& kernel, const NoiseModel& noise,
                          std::span<const double> times, Exec exec = Exec::parallel);

// Number of Gram factorizations performed by this process so far.
std::size_t gram_factorization_count();

// Negative log marginal likelihood
//   1/2 y^T G^-1 y + 1/2 log det G + N/2 log(2 pi).
double nlml(const StationaryKernel& kernel, const NoiseModel& noise, const TimeSeries& data);

// Log-space hyperparameters of an SM kernel with noise, laid out as
//   [log sigma2_1, log gamma_1, log theta_1, ..., log sigma2_Q, log gamma_Q,
//    log theta_Q, log noise_sigma2].
// theta and the noise variance are floored before the log so that zero maps
// to a finite value.
inline constexpr double kThetaFloor = 1e-8;
inline constexpr double kNoiseFloor = 1e-10;

Eigen::VectorXd encode_log_params(const SMKernel& kernel, const NoiseModel& noise);
std::pair<SMKernel, NoiseModel> decode_log_params(const Eigen::VectorXd& params,
                                                  std::size_t components);

// Gradient of nlml with respect to encode_log_params(kernel, noise).
Eigen::VectorXd nlml_gradient(const SMKernel& kernel, const NoiseModel& noise,
                              const TimeSeries& data);

// nlml and its gradient from a single factorization.
std::pair<double, Eigen::VectorXd> nlml_with_gradient(const SMKernel& kernel,
                                                      const NoiseModel& noise,
                                                      const TimeSeries& data,
                                                      Exec exec = Exec::parallel);

// A GP conditioned on data with fixed hyperparameters. Holds the Cholesky
// factor of the Gram matrix and the weights G^-1 y, computed once on
// construction in canonical (midpoint-centred) time. Immutable; share it via
// shared_ptr to build several spectrum posteriors off one factorization.
class TrainedGP {
 public:
  TrainedGP(KernelPtr kernel, NoiseModel noise, TimeSeries data, Exec exec = Exec::parallel);

  const StationaryKernel& kernel() const { return *kernel_; }
  const KernelPtr& kernel_ptr() const { return kernel_; }
  const NoiseModel& noise() const { return noise_; }
  const TimeSeries& data() const { return data_; }

  // Canonical time = original time + time_shift().
  double time_shift() const { return time_shift_; }
  const Eigen::LLT<Eigen::MatrixXd>& cholesky() const { return factor_.llt; }
  double jitter() const { return factor_.jitter; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double nlml() const { return nlml_; }

  // Kernel spec, noise and a fingerprint of the conditioning data.
  nlohmann::json to_json() const;

 private:
  KernelPtr kernel_;
  NoiseModel noise_;
  TimeSeries data_;
  double time_shift_;
  GramFactor factor_;
  Eigen::VectorXd weights_;
  double nlml_;
};

// {n, t_first, t_last, mean, variance, fnv1a64 over the raw doubles}.
nlohmann::json data_fingerprint(const TimeSeries& data);

struct TrainConfig {
  int restarts = 5;
  bool lomb_scargle_init = true;  // seed theta from periodogram peaks
  bool train_noise = true;
  int max_iterations = 1000;
  double ftol = 1e-8;  // absolute nlml improvement per iteration
  double gtol = 1e-6;  // projected gradient norm
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;  // restarts run concurrently
};

enum class TrainStatus { converged, max_iterations };

struct TraceRow {
  int iteration = 0;
  double nlml = 0.0;
  double step = 0.0;
};

struct TrainResult {
  SMKernel kernel;
  NoiseModel noise;
  double nlml_init = 0.0;
  double nlml_final = 0.0;
  TrainStatus status = TrainStatus::converged;
  int best_restart = 0;
  std::vector<TraceRow> trace;  // accepted steps of the winning restart
};

// Frequencies of the `count` highest local maxima of a 500-point
// Lomb-Scargle pass over (0, nu_max], strongest first. Maxima within 2% of
// the band of a stronger one are dropped.
std::vector<double> lomb_scargle_peaks(const TimeSeries& data, double nu_max, std::size_t count);

// Maximum-likelihood SM hyperparameters. Never returns a higher nlml than the
// initialization. A restart that exhausts max_iterations is reported through
// `status` and logged as a warning.
TrainResult train(const TimeSeries& data, const SMKernel& init, const NoiseModel& noise_init,
                  const TrainConfig& config = {});

// Draws n_paths samples of y ~ N(0, G) at `times` (rows are paths).
Eigen::MatrixXd sample_prior(const StationaryKernel& kernel, const NoiseModel& noise,
                             std::span<const double> times, std::size_t n_paths,
                             std::uint64_t seed);

std::string to_string(TrainStatus status);

}  // namespace bnse
