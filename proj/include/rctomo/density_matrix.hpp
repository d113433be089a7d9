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

#include "rctomo/hermitian.hpp"

namespace rctomo {

enum class BasisKind { kHgMode, kFrequencyBin };

/// Which physical modes the computational basis vectors e_n stand for. The
/// widths and centers are informational only; all arithmetic happens in the
/// abstract basis.
struct BasisLabel {
  BasisKind kind = BasisKind::kHgMode;
  double fwhm_thz = 1.0;                  // HG modes
  std::vector<double> bin_centers_thz{};  // frequency bins, strictly increasing
  double bin_width_thz = 0.07;

  static BasisLabel hg_modes(double fwhm_thz = 1.0);
  /// `count` bins spaced by `spacing_thz` starting at `first_center_thz`.
  static BasisLabel frequency_bins(int count, double first_center_thz = 194.0,
                                   double spacing_thz = 0.07);

  void validate() const;
  bool operator==(const BasisLabel&) const = default;
};

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  static constexpr double kTraceTolerance = 1e-9;
  static constexpr double kPsdTolerance = 1e-9;

  DensityMatrix() = default;
  /// Validates trace and positivity; throws ValidationError otherwise.
  explicit DensityMatrix(HermitianMatrix m, BasisLabel label = {});

  /// I / d.
  static DensityMatrix maximally_mixed(int dim, BasisLabel label = {});

  int dim() const noexcept { return m_.dim(); }
  const HermitianMatrix& hermitian() const noexcept { return m_; }
  const ComplexMatrix& matrix() const noexcept { return m_.matrix(); }
  const BasisLabel& label() const noexcept { return label_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  DensityMatrix with_label(BasisLabel label) const;

 private:
  HermitianMatrix m_;
  BasisLabel label_;
};

/// Closest unit-trace PSD matrix in Frobenius norm: the spectrum is projected
/// onto the probability simplex, eigenvectors are kept.
DensityMatrix project_to_state_space(const HermitianMatrix& m);

}  // namespace rctomo
