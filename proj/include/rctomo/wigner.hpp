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

#include <vector>

#include "rctomo/density_matrix.hpp"

namespace rctomo {

/// Phase-space point in units of the mode width.
struct PhasePoint {
  double t = 0.0;
  double omega = 0.0;

  double y() const { return t * t + omega * omega; }
  /// |alpha| with alpha = (t + i omega) / sqrt 2.
  double alpha_abs() const;
  double theta() const;
};

/// L_n^{(k)}(x) by the three-term recurrence.
double associated_laguerre(int n, int k, double x);

/// Wigner function of an HG-basis state, normalized so that its phase-space
/// integral divided by 2 pi is 1. Throws ValidationError for frequency-bin states.
double wigner_value(const DensityMatrix& rho, const PhasePoint& p);

struct AxisRange {
  double lo = -4.0;
  double hi = 4.0;
  int points = 101;

  double step() const { return (hi - lo) / (points - 1); }
  double at(int i) const { return lo + i * step(); }
};

struct WignerGrid {
  std::vector<double> t_axis;
  std::vector<double> omega_axis;
  RealMatrix values;  // values(i, j) = W(t_axis[i], omega_axis[j])
  /// sum W dt domega / (2 pi) over the grid.
  double normalization = 0.0;
};

WignerGrid wigner_grid(const DensityMatrix& rho, const AxisRange& t_range,
                       const AxisRange& omega_range);

/// Elementwise real part of a frequency-bin density matrix. Throws
/// ValidationError for HG-basis states.
RealMatrix export_u_matrix_real(const DensityMatrix& rho);

}  // namespace rctomo
