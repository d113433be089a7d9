// Copyright 2026 The rctomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rctomo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant (bad dimension, weights
/// that do not sum to one, malformed file, unknown config key, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its stated accuracy. `diagnostic()` carries
/// the residual, gap or offending eigenvalue that triggered the failure.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double diagnostic)
      : Error(what), diagnostic_(diagnostic) {}

  double diagnostic() const noexcept { return diagnostic_; }

 private:
  double diagnostic_;
};

}  // namespace rctomo
