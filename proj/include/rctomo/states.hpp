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
#include <vector>

#include "rctomo/density_matrix.hpp"
#include "rctomo/rng.hpp"

namespace rctomo {

struct StateComponent {
  ComplexVector amplitudes;  // unit norm
  double weight = 0.0;
};

/// A convex combination of pure states in a labelled computational basis.
struct StateSpec {
  BasisLabel label;
  std::vector<StateComponent> components;

  int dim() const;
  /// Weights >= 0 summing to 1 within 1e-9; unit-norm amplitudes within 1e-12;
  /// equal lengths. Throws ValidationError.
  void validate() const;
};

/// e_n in dimension d.
ComplexVector basis_vector(int n, int d);

/// Projector onto the n-th HG mode. Throws ValidationError unless 0 <= n < d.
DensityMatrix hg_pure_state(int n, int d);

DensityMatrix mixture(const StateSpec& spec);

/// sum_i s_i e_{n_i} / sqrt(count), normalized. `signs` entries are +1 or -1.
ComplexVector bin_superposition_vector(const std::vector<int>& indices,
                                       const std::vector<int>& signs, int d);
DensityMatrix frequency_bin_superposition(const std::vector<int>& indices,
                                          const std::vector<int>& signs, int d);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clamped to [0, 1].
/// Eigenvalues below 1e-13 of the largest are treated as zero, so pure inputs
/// reduce exactly to overlaps.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// Half the trace norm of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

int numerical_rank(const DensityMatrix& m, double tol = 1e-6);

/// Real parameters of a rank-r state in dimension d: (2d - r) r - 1.
int degrees_of_freedom(int d, int r);

// Reference states.

/// 0.17 |HG0><HG0| + 0.70 |HG1><HG1| + 0.13 |HG2><HG2|.
StateSpec hg_three_mode_mixture(int d = 10);

/// The four three-bin superpositions over bins {0, 3, 6}; `which` in [0, 4).
/// Sign patterns on (bin 0, bin 3, bin 6): (+,+,+), (+,-,+), (+,+,-), (-,+,+).
std::array<int, 3> bin_superposition_signs(int which);
inline constexpr std::array<int, 3> kSuperpositionBins{0, 3, 6};
StateSpec bin_superposition_state(int which, int d = 10);

/// Mixture w |s0><s0| + (1 - w) |s1><s1| of the first two superpositions whose
/// larger eigenvalue equals `larger_eigenvalue` (in [2/3, 1]).
StateSpec bin_two_superposition_mixture(double larger_eigenvalue = 0.73, int d = 10);

/// Weight w >= 1/2 on the first of two pure states with squared overlap `overlap`
/// such that the mixture has the given larger eigenvalue.
double mixture_weight_for_eigenvalue(double larger_eigenvalue, double overlap);

enum class StateFamily { kHgModes, kFrequencyBins };

/// Random rank-r state. HG family: r distinct modes out of the first max(4, r)
/// with Dirichlet(1) weights. Frequency-bin family: r distinct superpositions out
/// of the four with Dirichlet(1) weights (r <= 3 because they span 3 dimensions).
StateSpec random_rank_state(StateFamily family, int rank, int d, Rng& rng);

}  // namespace rctomo
