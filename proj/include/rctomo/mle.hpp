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

#include <optional>
#include <vector>

#include "rctomo/density_matrix.hpp"
#include "rctomo/measurement.hpp"

namespace rctomo {

enum class MlAlgorithm {
  /// Newton ascent on likelihood + mu log det(rho) restricted to tr rho = 1, with
  /// mu driven to zero. Default.
  kBarrierNewton,
  /// rho <- (1 - e) R rho R / tr + e rho with the mixing e chosen for ascent.
  kDilutedRrho,
};

struct MlOptions {
  MlAlgorithm algorithm = MlAlgorithm::kBarrierNewton;
  /// Barrier: stop once mu * d < tolerance * total weight, which bounds the
  /// likelihood suboptimality per click. RrhoR: stop once a sweep gains less
  /// than gain_tolerance.
  double tolerance = 1e-16;
  double gain_tolerance = 1e-10;
  int max_iterations = 0;  // 0: algorithm default (2000 barrier, 100000 RrhoR)
};

struct MlResult {
  DensityMatrix rho_ml;
  std::vector<std::vector<double>> p_hat;  // per basis
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Log-likelihood after each accepted iterate, starting with the initial point.
  std::vector<double> history;
};

/// Floor applied to probabilities inside the logarithm.
inline constexpr double kLikelihoodFloor = 1e-14;

/// sum_{k,l} n_kl log max(<b_kl|rho|b_kl>, 1e-14), with n_kl = total_k * nu_kl
/// (equal to the integer counts for measured records).
double log_likelihood(const DensityMatrix& rho, const Dataset& data);

/// Throws ValidationError for an empty or malformed dataset. A `warm_start` is
/// mixed with I/d at weight 1e-3; the maximally mixed state is used when absent.
MlResult maximize_likelihood(const Dataset& data, const MlOptions& options = {},
                             const std::optional<DensityMatrix>& warm_start = std::nullopt);

}  // namespace rctomo
