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
#include <span>
#include <vector>

namespace bnse {

// Observation times and values. Times are strictly increasing and need not
// be evenly spaced.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> times, std::vector<double> values);

  // Stable-sorts by time; throws InputError naming both indices when two
  // observations share a timestamp.
  static TimeSeries from_unsorted(std::vector<double> times, std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return times_.size(); }

  double span() const { return times_.back() - times_.front(); }
  double midpoint() const { return 0.5 * (times_.front() + times_.back()); }
  double mean() const;
  double variance() const;  // population variance of the values

  // Uniform when every spacing is within rel_tol of the mean spacing.
  bool is_uniform(double rel_tol = 1e-9) const;
  double mean_spacing() const;

  TimeSeries shifted(double dt) const;
  TimeSeries demeaned() const;
  TimeSeries subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

}  // namespace bnse
