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

#include "bnse/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "bnse/error.hpp"

namespace bnse {

namespace {

constexpr double kGrow = 1.618033988749895;
constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;

class CountedObjective {
 public:
  explicit CountedObjective(const Objective& f) : f_(f) {}

  double operator()(const Eigen::VectorXd& x) {
    ++evaluations_;
    const double v = f_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "Powell: objective is not finite (" << v << ") at x = [";
      for (Eigen::Index i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x(i);
      msg << "]";
      throw NumericalError(msg.str());
    }
    return v;
  }

  int evaluations() const { return evaluations_; }

 private:
  const Objective& f_;
  int evaluations_ = 0;
};

// Feasible step interval [lo, hi] along u from x inside the box.
std::pair<double, double> step_range(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                     const std::vector<Bound>& bounds) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (u(k) == 0.0) continue;
    double a = (bounds[k].lo - x(k)) / u(k);
    double b = (bounds[k].hi - x(k)) / u(k);
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  return {std::min(lo, 0.0), std::max(hi, 0.0)};
}

Eigen::VectorXd clip(Eigen::VectorXd x, const std::vector<Bound>& bounds) {
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = std::clamp(x(k), bounds[k].lo, bounds[k].hi);
  return x;
}

// Brent on [lo, hi] followed by polishing rounds on a rescaled interval
// around the result. Boost's Brent stops at a relative tolerance of about
// sqrt(eps) in its argument; rescaling lets the step reach an absolute
// precision of xtol along u.
template <class G>
std::pair<double, double> brent_polished(G& g, double lo, double hi, double norm, double xtol) {
  std::uintmax_t iters = 200;
  auto [s, fs] = boost::math::tools::brent_find_minima(g, lo, hi, kBrentBits, iters);
  const double rel = std::ldexp(1.0, 1 - kBrentBits);
  double radius = 10.0 * (rel * std::abs(s) + rel / 4.0);
  for (int round = 0; round < 3 && radius * norm > xtol; ++round) {
    const double centre = s;
    const double r = radius;
    auto scaled = [&](double v) { return g(std::clamp(centre + v * r, lo, hi)); };
    iters = 200;
    const auto [v, fv] = boost::math::tools::brent_find_minima(scaled, -1.0, 1.0, kBrentBits, iters);
    if (fv < fs) {
      s = std::clamp(centre + v * r, lo, hi);
      fs = fv;
    }
    radius = 10.0 * r * (rel * std::abs(v) + rel / 4.0);
  }
  return {s, fs};
}

// Minimizes f(x + s u) over s, starting at s = 0 with value fx. The bracket
// grows away from 0 by golden-ratio steps until the function turns up, so
// the minimum found is the one nearest to the current point in the
// downhill direction. Updates x and fx only on strict improvement.
void line_minimize(CountedObjective& f, Eigen::VectorXd& x, double& fx, const Eigen::VectorXd& u,
                   const std::vector<Bound>& bounds, double xtol) {
  const double norm = u.norm();
  if (norm == 0.0) return;
  const auto [smin, smax] = step_range(x, u, bounds);
  if (smax - smin <= 0.0) return;
  const Eigen::VectorXd origin = x;
  auto g = [&](double s) { return f(clip(origin + s * u, bounds)); };
  auto accept = [&](double s, double fs) {
    if (fs < fx) {
      x = clip(origin + s * u, bounds);
      fx = fs;
    }
  };

  const double h0 = std::max(1e-3 * (smax - smin), 10.0 * xtol / norm);
  double a = 0.0;
  const double f0 = fx;
  double b = std::min(h0, smax), fb = b > 0.0 ? g(b) : f0;
  double dir = 1.0;
  if (!(fb < f0)) {
    const double bn = std::max(-h0, smin);
    const double fbn = bn < 0.0 ? g(bn) : f0;
    if (!(fbn < f0)) {
      // The current point is a local minimum at this resolution.
      if (b - bn <= 0.0) return;
      const auto [s, fs] = brent_polished(g, bn, b, norm, xtol);
      accept(s, fs);
      return;
    }
    b = bn;
    fb = fbn;
    dir = -1.0;
  }
  const double limit = dir > 0.0 ? smax : smin;
  double c = b + kGrow * (b - a);
  c = dir > 0.0 ? std::min(c, limit) : std::max(c, limit);
  double fc = c != b ? g(c) : fb;
  while (fc < fb && c != limit) {
    a = b;
    b = c;
    fb = fc;
    c = b + kGrow * (b - a);
    c = dir > 0.0 ? std::min(c, limit) : std::max(c, limit);
    fc = g(c);
  }
  double best_s = b, best_f = fb;
  if (fc < fb) {
    // Still descending at the boundary.
    best_s = c;
    best_f = fc;
  }
  const double lo = std::min(a, c), hi = std::max(a, c);
  if (hi > lo) {
    const auto [s, fs] = brent_polished(g, lo, hi, norm, xtol);
    if (fs < best_f) {
      best_s = s;
      best_f = fs;
    }
  }
  accept(best_s, best_f);
}

Eigen::MatrixXd random_basis(Eigen::Index n, std::mt19937_64& rng, const Eigen::VectorXd& scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = normal(rng);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ();
  return scale.asDiagonal() * q;
}

}  // namespace

PowellResult powell_minimize(const Objective& objective, std::vector<double> x0,
                             std::vector<Bound> bounds, const PowellOptions& options) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  if (n == 0) throw InputError("Powell: empty starting point");
  if (bounds.size() != x0.size()) throw InputError("Powell: one bound per coordinate required");
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (!std::isfinite(bounds[k].lo) || !std::isfinite(bounds[k].hi) ||
        !(bounds[k].lo <= bounds[k].hi)) {
      throw InputError("Powell: bounds must be finite with lo <= hi");
    }
    if (!(x0[k] >= bounds[k].lo && x0[k] <= bounds[k].hi)) {
      throw InputError("Powell: starting point lies outside the bounds");
    }
  }
  if (options.max_iter < 1) throw InputError("Powell: max_iter must be >= 1");

  CountedObjective f(objective);
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  double fx = f(x);

  // Directions are scaled to the box so that step lengths are comparable.
  Eigen::VectorXd width(n);
  for (Eigen::Index k = 0; k < n; ++k) width(k) = std::max(bounds[k].hi - bounds[k].lo, 1e-300);
  Eigen::MatrixXd dirs = width.asDiagonal();
  std::mt19937_64 rng(options.seed);

  PowellResult out;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    out.iterations = iter;
    const Eigen::VectorXd x_start = x;
    const double f_start = fx;
    double biggest = 0.0;
    Eigen::Index ibig = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double before = fx;
      line_minimize(f, x, fx, dirs.col(i), bounds, options.xtol);
      if (before - fx > biggest) {
        biggest = before - fx;
        ibig = i;
      }
    }
    if (2.0 * (f_start - fx) <= options.ftol * (std::abs(f_start) + std::abs(fx)) + 1e-300) {
      out.converged = true;
      break;
    }
    if (n == 1) continue;

    const Eigen::VectorXd shift = x - x_start;
    const Eigen::VectorXd xe = clip(x + shift, bounds);
    const double fe = f(xe);
    if (fe < f_start) {
      const double t = 2.0 * (f_start - 2.0 * fx + fe) * std::pow(f_start - fx - biggest, 2) -
                       biggest * std::pow(f_start - fe, 2);
      if (t < 0.0 && shift.norm() > 0.0) {
        line_minimize(f, x, fx, shift, bounds, options.xtol);
        dirs.col(ibig) = dirs.col(n - 1);
        dirs.col(n - 1) = shift;
      }
    }
    // Reset a degenerate direction set to a random orthonormal frame.
    Eigen::MatrixXd unit = dirs;
    for (Eigen::Index j = 0; j < n; ++j) unit.col(j) /= std::max(unit.col(j).norm(), 1e-300);
    if (std::abs(unit.determinant()) < 1e-8) dirs = random_basis(n, rng, width);
  }
  out.x.assign(x.data(), x.data() + n);
  out.f = fx;
  out.evaluations = f.evaluations();
  return out;
}

}  // namespace bnse
