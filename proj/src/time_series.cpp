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

#include "bnse/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bnse/error.hpp"

namespace bnse {

TimeSeries::TimeSeries(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw InputError("time series: " + std::to_string(times_.size()) + " times but " +
                     std::to_string(values_.size()) + " values");
  }
  if (times_.empty()) throw InputError("time series: at least one observation is required");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
      throw InputError("time series: non-finite entry at index " + std::to_string(i));
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw InputError("time series: times must be strictly increasing (index " +
                       std::to_string(i) + ")");
    }
  }
}

TimeSeries TimeSeries::from_unsorted(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size()) {
    throw InputError("time series: times and values differ in length");
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> t(times.size()), y(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    t[i] = times[order[i]];
    y[i] = values[order[i]];
    if (i > 0 && t[i] == t[i - 1]) {
      throw InputError("time series: duplicate timestamp " + std::to_string(t[i]) +
                       " at rows " + std::to_string(order[i - 1]) + " and " +
                       std::to_string(order[i]));
    }
  }
  return TimeSeries(std::move(t), std::move(y));
}

double TimeSeries::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(size());
}

double TimeSeries::variance() const {
  const double m = mean();
  double s = 0.0;
  for (double v : values_) s += (v - m) * (v - m);
  return s / static_cast<double>(size());
}

double TimeSeries::mean_spacing() const {
  if (size() < 2) return 0.0;
  return span() / static_cast<double>(size() - 1);
}

bool TimeSeries::is_uniform(double rel_tol) const {
  if (size() < 2) return true;
  const double dt = mean_spacing();
  for (std::size_t i = 1; i < size(); ++i) {
    if (std::abs((times_[i] - times_[i - 1]) - dt) > rel_tol * dt) return false;
  }
  return true;
}

TimeSeries TimeSeries::shifted(double dt) const {
  auto t = times_;
  for (auto& v : t) v += dt;
  return TimeSeries(std::move(t), values_);
}

TimeSeries TimeSeries::demeaned() const {
  const double m = mean();
  auto y = values_;
  for (auto& v : y) v -= m;
  return TimeSeries(times_, std::move(y));
}

TimeSeries TimeSeries::subset(std::span<const std::size_t> indices) const {
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  std::sort(idx.begin(), idx.end());
  std::vector<double> t, y;
  t.reserve(idx.size());
  y.reserve(idx.size());
  for (auto i : idx) {
    if (i >= size()) throw InputError("time series: subset index out of range");
    t.push_back(times_[i]);
    y.push_back(values_[i]);
  }
  return TimeSeries(std::move(t), std::move(y));
}

}  // namespace bnse
