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

#include <stdexcept>
#include <string>

namespace bnse {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: malformed files, bad configuration, violated
// preconditions. The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: a factorization that does not exist even after jitter,
// a non-finite objective, a negative variance beyond tolerance. The CLI maps
// these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bnse
