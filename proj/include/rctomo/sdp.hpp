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

// Small dense primal-dual interior-point solver for one Hermitian matrix block
// plus one nonnegative (LP) block, in the dual form
//
//   maximize    b^T y
//   subject to  S = C - sum_i y_i A_i  is PSD,
//               s = c_lp - L^T y      >= 0,
//
// paired with the primal
//
//   minimize    <C, X> + c_lp^T x
//   subject to  <A_i, X> + (L x)_i = b_i,   X PSD,   x >= 0.
//
// Search directions are HKM with a Mehrotra predictor-corrector. The solver
// must be started from a strictly feasible pair: y = 0 with C positive definite
// and c_lp > 0, and a primal X, x satisfying the equality constraints.

#include <vector>

#include "rctomo/hermitian.hpp"

namespace rctomo {

struct SdpProblem {
  ComplexMatrix c;
  std::vector<ComplexMatrix> a;  // Hermitian
  RealVector b;
  RealVector lp_c;  // may be empty
  RealMatrix lp_a;  // b.size() x lp_c.size()
};

struct SdpStart {
  ComplexMatrix x;
  RealVector lp_x;
};

struct SdpOptions {
  double gap_tolerance = 1e-10;
  int max_iterations = 200;
  double step_fraction = 0.95;
};

struct SdpSolution {
  RealVector y;
  ComplexMatrix s;
  ComplexMatrix x;
  RealVector lp_s;
  RealVector lp_x;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// <X, S> + x^T s.
  double gap = 0.0;
  /// Largest |b_i - <A_i, X> - (L x)_i|.
  double primal_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Throws ValidationError for inconsistent shapes or a start that is not
/// strictly feasible, NumericalError when a Newton system cannot be solved.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpStart& start,
                      const SdpOptions& options = {});

}  // namespace rctomo
