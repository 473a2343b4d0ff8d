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

#include "bnse/gp.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>

#include <spdlog/spdlog.h>

#include "bnse/error.hpp"

namespace bnse {

namespace {

constexpr double kPi = std::numbers::pi;

std::atomic<std::size_t> g_factorizations{0};

std::vector<double> canonical_times(const TimeSeries& data) {
  const double shift = -data.midpoint();
  std::vector<double> t(data.times());
  for (auto& v : t) v += shift;
  return t;
}

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

Eigen::MatrixXd kernel_gram(const StationaryKernel& kernel, const NoiseModel& noise,
                            std::span<const double> times, double jitter, Exec exec) {
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd gram(n, n);
  const double diag = noise.sigma2 + jitter;
  // Column j is filled on its own, mirrored from the upper triangle so the
  // result is exactly symmetric.
  for_each_index(n, exec, [&](std::ptrdiff_t j) {
    for (Eigen::Index i = 0; i <= j; ++i) gram(i, j) = kernel.eval(times[i] - times[j]);
  });
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) gram(i, j) = gram(j, i);
    gram(j, j) += diag;
  }
  return gram;
}

GramFactor factorize_gram(const StationaryKernel& kernel, const NoiseModel& noise,
                          std::span<const double> times, Exec exec) {
  if (times.empty()) throw InputError("Gram matrix needs at least one time");
  g_factorizations.fetch_add(1, std::memory_order_relaxed);
  Eigen::MatrixXd gram = kernel_gram(kernel, noise, times, 0.0, exec);
  const double k0 = std::max(kernel.eval(0.0), std::numeric_limits<double>::min());
  GramFactor out;
  double added = 0.0;
  for (double rel = kJitterStart; rel <= kJitterMax * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * k0;
    gram.diagonal().array() += jitter - added;
    added = jitter;
    out.llt.compute(gram);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = jitter;
      if (rel > kJitterStart) {
        spdlog::info("Gram factorization needed jitter {:.3g} (x K(0) = {:.3g})", jitter, rel);
      }
      return out;
    }
  }
  throw NumericalError("Gram matrix is not positive definite even with jitter " +
                       std::to_string(kJitterMax) +
                       " * K(0); hyperparameters are likely degenerate");
}

std::size_t gram_factorization_count() { return g_factorizations.load(); }

double nlml(const StationaryKernel& kernel, const NoiseModel& noise, const TimeSeries& data) {
  const auto t = canonical_times(data);
  const auto factor = factorize_gram(kernel, noise, t, Exec::serial);
  const auto y = as_vector(data.values());
  const Eigen::VectorXd a = factor.llt.solve(y);
  const Eigen::MatrixXd& l = factor.llt.matrixLLT();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double n = static_cast<double>(data.size());
  return 0.5 * y.dot(a) + 0.5 * log_det + 0.5 * n * std::log(2.0 * kPi);
}

Eigen::VectorXd encode_log_params(const SMKernel& kernel, const NoiseModel& noise) {
  const auto& comps = kernel.components();
  Eigen::VectorXd p(3 * comps.size() + 1);
  for (std::size_t q = 0; q < comps.size(); ++q) {
    p(3 * q) = std::log(comps[q].sigma2);
    p(3 * q + 1) = std::log(comps[q].gamma);
    p(3 * q + 2) = std::log(std::max(comps[q].theta, kThetaFloor));
  }
  p(p.size() - 1) = std::log(std::max(noise.sigma2, kNoiseFloor));
  return p;
}

std::pair<SMKernel, NoiseModel> decode_log_params(const Eigen::VectorXd& params,
                                                  std::size_t components) {
  if (params.size() != static_cast<Eigen::Index>(3 * components + 1)) {
    throw InputError("log-parameter vector has the wrong length");
  }
  std::vector<SMComponent> comps(components);
  for (std::size_t q = 0; q < components; ++q) {
    comps[q] = {std::exp(params(3 * q)), std::exp(params(3 * q + 1)),
                std::exp(params(3 * q + 2))};
  }
  return {SMKernel(std::move(comps)), NoiseModel{std::exp(params(params.size() - 1))}};
}

std::pair<double, Eigen::VectorXd> nlml_with_gradient(const SMKernel& kernel,
                                                      const NoiseModel& noise,
                                                      const TimeSeries& data, Exec exec) {
  const auto t = canonical_times(data);
  const auto factor = factorize_gram(kernel, noise, t, exec);
  const auto y = as_vector(data.values());
  const auto n = static_cast<Eigen::Index>(t.size());
  const Eigen::VectorXd a = factor.llt.solve(y);
  const Eigen::MatrixXd& l = factor.llt.matrixLLT();
  const double value = 0.5 * y.dot(a) + l.diagonal().array().log().sum() +
                       0.5 * static_cast<double>(n) * std::log(2.0 * kPi);

  // dNLML/dp = 1/2 tr(W dG/dp),  W = G^-1 - a a^T.
  Eigen::MatrixXd w = factor.llt.solve(Eigen::MatrixXd::Identity(n, n));
  w.noalias() -= a * a.transpose();

  const auto& comps = kernel.components();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(comps.size()) + 1);
  for (std::size_t q = 0; q < comps.size(); ++q) {
    const auto& c = comps[q];
    double g_sigma = 0.0, g_gamma = 0.0, g_theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double tau = t[i] - t[j];
        const double e = c.sigma2 * std::exp(-c.gamma * tau * tau);
        const double phase = 2.0 * kPi * c.theta * tau;
        const double wij = w(i, j);
        const double ec = e * std::cos(phase);
        g_sigma += wij * ec;
        g_gamma += wij * (-c.gamma * tau * tau) * ec;
        g_theta += wij * (-c.theta * 2.0 * kPi * tau) * e * std::sin(phase);
      }
    }
    grad(3 * q) = 0.5 * g_sigma;
    grad(3 * q + 1) = 0.5 * g_gamma;
    grad(3 * q + 2) = 0.5 * g_theta;
  }
  grad(grad.size() - 1) = 0.5 * noise.sigma2 * w.trace();
  return {value, grad};
}

Eigen::VectorXd nlml_gradient(const SMKernel& kernel, const NoiseModel& noise,
                              const TimeSeries& data) {
  return nlml_with_gradient(kernel, noise, data, Exec::serial).second;
}

TrainedGP::TrainedGP(KernelPtr kernel, NoiseModel noise, TimeSeries data, Exec exec)
    : kernel_(std::move(kernel)),
      noise_(noise),
      data_(std::move(data)),
      time_shift_(-data_.midpoint()) {
  if (!kernel_) throw InputError("TrainedGP needs a kernel");
  noise_.validate();
  const auto t = canonical_times(data_);
  factor_ = factorize_gram(*kernel_, noise_, t, exec);
  const auto y = as_vector(data_.values());
  weights_ = factor_.llt.solve(y);
  const Eigen::MatrixXd& l = factor_.llt.matrixLLT();
  nlml_ = 0.5 * y.dot(weights_) + l.diagonal().array().log().sum() +
          0.5 * static_cast<double>(data_.size()) * std::log(2.0 * kPi);
}

nlohmann::json data_fingerprint(const TimeSeries& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    mix(data.times()[i]);
    mix(data.values()[i]);
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return {{"n", data.size()},
          {"t_first", data.times().front()},
          {"t_last", data.times().back()},
          {"mean", data.mean()},
          {"variance", data.variance()},
          {"fnv1a64", hex}};
}

nlohmann::json TrainedGP::to_json() const {
  auto doc = kernel_spec_to_json({kernel_, noise_});
  return {{"kernel", doc},
          {"noise_sigma2", noise_.sigma2},
          {"jitter", factor_.jitter},
          {"time_shift", time_shift_},
          {"nlml", nlml_},
          {"data", data_fingerprint(data_)}};
}

Eigen::MatrixXd sample_prior(const StationaryKernel& kernel, const NoiseModel& noise,
                             std::span<const double> times, std::size_t n_paths,
                             std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(times.size());
  if (n_paths == 0) return Eigen::MatrixXd(0, n);
  const auto factor = factorize_gram(kernel, noise, times, Exec::serial);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(n_paths));
  for (Eigen::Index p = 0; p < z.cols(); ++p) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, p) = normal(rng);
  }
  const Eigen::MatrixXd paths = factor.llt.matrixL() * z;
  return paths.transpose();
}

std::string to_string(TrainStatus status) {
  return status == TrainStatus::converged ? "converged" : "max_iterations";
}

}  // namespace bnse
