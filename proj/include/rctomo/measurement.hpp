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

#include <cstdint>
#include <vector>

#include "rctomo/density_matrix.hpp"
#include "rctomo/rng.hpp"

namespace rctomo {

/// d orthonormal vectors, stored as the columns of a unitary.
struct MeasurementBasis {
  ComplexMatrix vectors;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(vectors.rows()); }
  ComplexVector vector(int l) const { return vectors.col(l); }
  /// Gram matrix equals identity to `tol`; throws ValidationError otherwise.
  void validate(double tol = 1e-10) const;
};

struct QpgConfig {
  double theta = 1.5707963267948966;  // mixing angle; eta = sin^2 theta
  long long clicks_per_basis = 10000;
  bool noiseless = false;
  /// Reserved additive background per outcome; must be 0 in this model.
  double background_rate = 0.0;

  double eta() const;
  void validate() const;
};

struct CountRecord {
  int basis_index = 0;
  std::vector<long long> counts;
  /// Relative frequencies. For noiseless records these are the exact Born
  /// probabilities, while counts hold the rounded integers.
  std::vector<double> frequencies;

  long long total() const;
  /// frequencies from counts.
  static CountRecord from_counts(int basis_index, std::vector<long long> counts);
};

/// Bases together with one record per basis.
struct Dataset {
  std::vector<MeasurementBasis> bases;
  std::vector<CountRecord> records;

  int dim() const { return bases.empty() ? 0 : bases.front().dim(); }
  std::size_t size() const { return bases.size(); }
  void validate() const;
};

/// Haar-random unitary via QR of a complex Gaussian matrix with phase fix.
MeasurementBasis haar_unitary(int d, Rng& rng);
/// Convenience: seeds a fresh engine and records the seed.
MeasurementBasis haar_unitary(int d, std::uint64_t seed);

/// p_l = <b_l|rho|b_l>, clamped into [0, 1]. Throws ValidationError on dimension
/// mismatch and NumericalError if a value falls below -1e-10 or the sum misses 1
/// by more than 1e-9.
std::vector<double> born_probabilities(const DensityMatrix& rho, const MeasurementBasis& basis);

/// N eta <mode|rho|mode>.
double expected_converted_counts(const DensityMatrix& rho, const ComplexVector& mode,
                                 const QpgConfig& config);

/// Counts summing to `total` proportional to `probabilities` (largest remainder;
/// ties resolved towards the lower index).
std::vector<long long> largest_remainder_counts(const std::vector<double>& probabilities,
                                                long long total);

/// Multinomial draw by sequential binomials.
std::vector<long long> multinomial(const std::vector<double>& probabilities, long long total,
                                   Rng& rng);

CountRecord simulate_basis_measurement(const DensityMatrix& rho, const MeasurementBasis& basis,
                                       int basis_index, const QpgConfig& config, Rng& rng);

/// Convex mixture of record sets measured on the same bases: frequencies are
/// mixed with `weights`, counts are rescaled to the common total by largest
/// remainder.
std::vector<CountRecord> mix_count_records(const std::vector<std::vector<CountRecord>>& sets,
                                           const std::vector<double>& weights);

}  // namespace rctomo
