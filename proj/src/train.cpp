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

// Multi-start maximum-likelihood training of spectral mixture hyperparameters.
//
// Each restart runs a limited-memory quasi-Newton descent on the log-space
// parameters with an Armijo backtracking line search and box bounds enforced
// by projection. Restart 0 starts from the caller's initialization, so the
// returned nlml never exceeds the initial one.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include <spdlog/spdlog.h>

#include "bnse/baselines.hpp"
#include "bnse/error.hpp"
#include "bnse/gp.hpp"

namespace bnse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMemory = 10;
constexpr double kArmijo = 1e-4;
constexpr double kMaxLogStep = 2.0;  // largest first trial move per coordinate

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<bool> fixed;
};

struct RestartOutcome {
  Eigen::VectorXd params;
  double nlml = kInf;
  TrainStatus status = TrainStatus::converged;
  std::vector<TraceRow> trace;
  bool failed = false;
};

// theta stays below the average Nyquist frequency N / (2 span) (or the
// initial value, if larger): above it an evenly sampled series cannot tell
// a component from its alias.
Bounds make_bounds(const SMKernel& init, const TimeSeries& data, bool train_noise) {
  const std::size_t q = init.size();
  const auto p = static_cast<Eigen::Index>(3 * q + 1);
  Bounds b{Eigen::VectorXd::Constant(p, std::log(1e-10)),
           Eigen::VectorXd::Constant(p, std::log(1e10)), std::vector<bool>(p, false)};
  const double span = std::max(data.span(), 1e-12);
  const double nu = static_cast<double>(data.size()) / (2.0 * span);
  for (std::size_t c = 0; c < q; ++c) {
    const double theta_max = std::max(nu, init.components()[c].theta);
    b.lower(3 * c + 2) = std::log(kThetaFloor);
    b.upper(3 * c + 2) = std::log(std::max(theta_max, 2.0 * kThetaFloor));
  }
  b.lower(p - 1) = std::log(kNoiseFloor);
  b.fixed[p - 1] = !train_noise;
  return b;
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const Bounds& b) {
  return x.cwiseMax(b.lower).cwiseMin(b.upper);
}

// Zero the components that are fixed or pinned at a bound with the gradient
// pushing outward.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Bounds& b) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (b.fixed[i] || (x(i) <= b.lower(i) && g(i) > 0.0) || (x(i) >= b.upper(i) && g(i) < 0.0)) {
      pg(i) = 0.0;
    }
  }
  return pg;
}

struct Evaluation {
  double value = kInf;
  Eigen::VectorXd grad;
};

Evaluation evaluate(const Eigen::VectorXd& x, std::size_t q, const TimeSeries& data) {
  try {
    const auto [kernel, noise] = decode_log_params(x, q);
    auto [v, g] = nlml_with_gradient(kernel, noise, data, Exec::serial);
    if (!std::isfinite(v) || !g.allFinite()) return {};
    return {v, std::move(g)};
  } catch (const NumericalError&) {
    return {};
  }
}

RestartOutcome descend(Eigen::VectorXd x, std::size_t q, const TimeSeries& data,
                       const Bounds& bounds, const TrainConfig& cfg) {
  RestartOutcome out;
  x = project(x, bounds);
  auto cur = evaluate(x, q, data);
  if (!std::isfinite(cur.value)) {
    out.failed = true;
    return out;
  }
  out.trace.push_back({0, cur.value, 0.0});

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;  // (s, y)
  out.status = TrainStatus::max_iterations;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const Eigen::VectorXd pg = projected_gradient(x, cur.grad, bounds);
    if (pg.norm() < cfg.gtol) {
      out.status = TrainStatus::converged;
      break;
    }

    // Two-loop recursion on the projected gradient.
    Eigen::VectorXd d = pg;
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      const auto& [s, y] = memory[k];
      alpha[k] = s.dot(d) / y.dot(s);
      d -= alpha[k] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      d *= s.dot(y) / y.dot(y);
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, y] = memory[k];
      const double beta = y.dot(d) / y.dot(s);
      d += (alpha[k] - beta) * s;
    }
    d = -d;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (pg(i) == 0.0) d(i) = 0.0;
    }
    if (!(d.dot(pg) < 0.0)) {
      d = -pg;
      memory.clear();
    }
    const double dmax = d.cwiseAbs().maxCoeff();
    double step = dmax > kMaxLogStep ? kMaxLogStep / dmax : 1.0;

    Eigen::VectorXd xn;
    Evaluation next;
    bool accepted = false;
    while (step > 1e-14) {
      xn = project(x + step * d, bounds);
      next = evaluate(xn, q, data);
      if (std::isfinite(next.value) &&
          next.value <= cur.value + kArmijo * cur.grad.dot(xn - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent along the best available direction: stationary to
      // working precision.
      out.status = TrainStatus::converged;
      break;
    }

    const double improvement = cur.value - next.value;
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = next.grad - cur.grad;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(s, y);
      if (memory.size() > static_cast<std::size_t>(kMemory)) memory.pop_front();
    }
    x = std::move(xn);
    cur = std::move(next);
    out.trace.push_back({it, cur.value, step});
    if (improvement < cfg.ftol) {
      out.status = TrainStatus::converged;
      break;
    }
  }
  out.params = x;
  out.nlml = cur.value;
  return out;
}

}  // namespace

std::vector<double> lomb_scargle_peaks(const TimeSeries& data, double nu_max, std::size_t count) {
  if (data.size() < 3) return {};
  LSConfig cfg;
  cfg.grid = linear_grid(nu_max / 500.0, nu_max, 500);
  cfg.exec = Exec::serial;
  const auto est = lomb_scargle(data, cfg);
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < est.size(); ++i) {
    if (est.psd_mean[i] > est.psd_mean[i - 1] && est.psd_mean[i] >= est.psd_mean[i + 1]) {
      maxima.push_back(i);
    }
  }
  std::sort(maxima.begin(), maxima.end(),
            [&](std::size_t a, std::size_t b) { return est.psd_mean[a] > est.psd_mean[b]; });
  // A line of finite width gives a cluster of adjacent maxima; keep only the
  // strongest of any within 2% of the band.
  constexpr std::size_t kSeparation = 10;
  std::vector<std::size_t> kept;
  for (std::size_t i : maxima) {
    if (kept.size() == count) break;
    const bool close = std::any_of(kept.begin(), kept.end(), [&](std::size_t j) {
      return (i > j ? i - j : j - i) < kSeparation;
    });
    if (!close) kept.push_back(i);
  }
  std::vector<double> out;
  for (std::size_t i : kept) out.push_back(est.grid[i]);
  return out;
}

TrainResult train(const TimeSeries& data, const SMKernel& init, const NoiseModel& noise_init,
                  const TrainConfig& config) {
  if (config.restarts < 1) throw InputError("train: restarts must be >= 1");
  if (config.max_iterations < 1) throw InputError("train: max_iterations must be >= 1");
  noise_init.validate();

  // Canonical time: the Gram matrix depends on lags only, the shift keeps
  // the lag arithmetic well conditioned.
  const TimeSeries canon = data.shifted(-data.midpoint());
  const std::size_t q = init.size();
  const Bounds bounds = make_bounds(init, canon, config.train_noise);

  const double nlml_init = nlml(init, noise_init, canon);
  const double span = std::max(canon.span(), 1e-12);
  const double nu = static_cast<double>(canon.size()) / (2.0 * span);
  const double var = std::max(canon.variance(), 1e-12);

  // Starting points are drawn up front so the result does not depend on how
  // restarts are scheduled.
  std::vector<Eigen::VectorXd> starts{encode_log_params(init, noise_init)};
  const auto peaks = config.lomb_scargle_init ? lomb_scargle_peaks(canon, nu, 2 * q)
                                              : std::vector<double>{};
  for (int r = 1; r < config.restarts; ++r) {
    std::mt19937_64 rng(config.seed + 7919ULL * static_cast<std::uint64_t>(r));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SMComponent> comps(init.components());
    for (std::size_t c = 0; c < q; ++c) {
      comps[c].sigma2 = var / static_cast<double>(q);
      comps[c].gamma = init.components()[c].gamma * std::exp(2.0 * unit(rng) - 1.0);
      const std::size_t peak_index = c + static_cast<std::size_t>(r - 1) * q;
      if (peak_index < peaks.size()) {
        comps[c].theta = peaks[peak_index];
      } else {
        // log-uniform over [nu / 100, nu]
        comps[c].theta = nu * std::pow(10.0, -2.0 * unit(rng));
      }
    }
    NoiseModel noise = noise_init;
    if (config.train_noise && noise.sigma2 <= kNoiseFloor) noise.sigma2 = 0.1 * var;
    starts.push_back(encode_log_params(SMKernel(std::move(comps)), noise));
  }

  std::vector<RestartOutcome> outcomes(starts.size());
  for_each_index(static_cast<std::ptrdiff_t>(starts.size()), config.exec, [&](std::ptrdiff_t r) {
    outcomes[r] = descend(starts[r], q, canon, bounds, config);
  });

  std::size_t best = outcomes.size();
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].failed) {
      spdlog::warn("train: restart {} could not be evaluated at its starting point", r);
      continue;
    }
    if (outcomes[r].status == TrainStatus::max_iterations) {
      spdlog::warn("train: restart {} stopped at max_iterations ({}) with nlml {:.10g}", r,
                   config.max_iterations, outcomes[r].nlml);
    }
    if (best == outcomes.size() || outcomes[r].nlml < outcomes[best].nlml) best = r;
  }

  TrainResult result{init, noise_init, nlml_init, nlml_init, TrainStatus::converged, 0, {}};
  if (best == outcomes.size() || !(outcomes[best].nlml < nlml_init)) {
    // Nothing improved on the initialization; hand it back unchanged.
    if (best < outcomes.size()) {
      result.status = outcomes[best].status;
      result.trace = outcomes[0].trace;
    }
    return result;
  }
  auto [kernel, noise] = decode_log_params(outcomes[best].params, q);
  if (!config.train_noise) noise = noise_init;
  result.kernel = std::move(kernel);
  result.noise = noise;
  result.nlml_final = outcomes[best].nlml;
  result.status = outcomes[best].status;
  result.best_restart = static_cast<int>(best);
  result.trace = std::move(outcomes[best].trace);
  spdlog::info("train: best restart {} nlml {:.10g} -> {:.10g} ({})", best, nlml_init,
               result.nlml_final, to_string(result.status));
  return result;
}

}  // namespace bnse
