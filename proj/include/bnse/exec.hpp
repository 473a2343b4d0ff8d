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
#include <exception>
#include <mutex>

namespace bnse {

// Execution policy for the data-parallel loops of the library. `serial` is
// the reference path: every parallel kernel must produce bitwise-identical
// output to it, since each index is computed independently.
enum class Exec { serial, parallel };

// Runs fn(i) for i in [0, n). Under Exec::parallel the loop is split across
// OpenMP threads; the first exception thrown by any iteration is rethrown on
// the calling thread after the loop joins.
template <class Fn>
void for_each_index(std::ptrdiff_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bnse
