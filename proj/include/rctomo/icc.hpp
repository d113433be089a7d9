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

#include <array>
#include <optional>
#include <vector>

#include "rctomo/density_matrix.hpp"
#include "rctomo/measurement.hpp"
#include "rctomo/rng.hpp"

namespace rctomo {

/// Gaussian Hermitian matrix resampled until min |eigenvalue| > 1e-3 * spectral
/// norm (at most 100 draws, then the diagonal is shifted), scaled to unit
/// spectral norm.
HermitianMatrix random_full_rank_z(int d, Rng& rng);

/// relative * (lambda_max(z) - lambda_min(z)).
double ic_threshold(const HermitianMatrix& z, double relative = 1e-5);

/// Per-outcome bands sigmas * sqrt(p (1 - p) / clicks).
std::vector<std::vector<double>> binomial_bands(const std::vector<std::vector<double>>& p_hat,
                                                long long clicks, double sigmas = 3.0);

struct IccProblem {
  std::vector<MeasurementBasis> bases;
  std::vector<std::vector<double>> p_hat;
  HermitianMatrix z;
  /// Per-outcome allowed deviation |<b|rho|b> - p_hat| <= tolerance. Empty means
  /// equality for every outcome; zero entries are equalities.
  std::vector<std::vector<double>> tolerance;
  /// Positive definite feasible state used as the interior start; the maximally
  /// mixed state when absent (only valid if it is feasible).
  std::optional<DensityMatrix> center;

  void validate() const;
};

struct IccOptions {
  double relative_threshold = 1e-5;
  /// Interior-point stopping gap.
  double solver_gap = 1e-10;
  /// Gap above which a solve is reported as a failure.
  double certified_gap = 1e-7;
  /// Relative singular-value cut for the null space of the equality rows.
  double null_tolerance = 1e-9;
  int max_iterations = 200;
};

struct IccCertificate {
  double f_min = 0.0;
  double f_max = 0.0;
  double s_cvx = 0.0;
  DensityMatrix rho_min;
  DensityMatrix rho_max;
  std::array<double, 2> duality_gaps{0.0, 0.0};
  std::array<int, 2> iterations{0, 0};
  /// Largest constraint violation of rho_min / rho_max relative to p_hat.
  double max_violation = 0.0;
  /// Real dimension of the affine set the programs search over.
  int free_parameters = 0;
  double threshold = 0.0;
  bool is_ic = false;
};

/// Extremizes tr(rho Z) over states consistent with the data. Throws
/// ValidationError when the center violates the constraints (naming the worst
/// one) and NumericalError when a solve misses `certified_gap`.
IccCertificate solve_extrema(const IccProblem& problem, const IccOptions& options = {});

bool is_informationally_complete(const IccCertificate& cert, double threshold);

}  // namespace rctomo
