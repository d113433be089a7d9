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

#include "rctomo/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"

namespace rctomo {

void MeasurementBasis::validate(double tol) const {
  if (vectors.rows() < 1 || vectors.rows() != vectors.cols()) {
    throw ValidationError("measurement basis must be a square matrix of dimension >= 1");
  }
  const double err = (vectors.adjoint() * vectors - ComplexMatrix::Identity(dim(), dim())).norm();
  if (!(err <= tol)) {
    throw ValidationError("measurement basis is not orthonormal (Gram error " + std::to_string(err) +
                          ")");
  }
}

double QpgConfig::eta() const {
  const double s = std::sin(theta);
  return s * s;
}

void QpgConfig::validate() const {
  if (clicks_per_basis <= 0) throw ValidationError("qpg.clicks_per_basis must be positive");
  if (!std::isfinite(theta)) throw ValidationError("qpg.theta must be finite");
  if (background_rate != 0.0) throw ValidationError("qpg.background_rate must be 0");
}

long long CountRecord::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0LL);
}

CountRecord CountRecord::from_counts(int basis_index, std::vector<long long> counts) {
  CountRecord r;
  r.basis_index = basis_index;
  r.counts = std::move(counts);
  const long long n = r.total();
  for (long long c : r.counts) {
    if (c < 0) throw ValidationError("counts must be nonnegative");
  }
  r.frequencies.resize(r.counts.size(), 0.0);
  if (n > 0) {
    for (std::size_t l = 0; l < r.counts.size(); ++l) {
      r.frequencies[l] = static_cast<double>(r.counts[l]) / static_cast<double>(n);
    }
  }
  return r;
}

void Dataset::validate() const {
  if (bases.empty()) throw ValidationError("dataset has no bases");
  if (bases.size() != records.size()) throw ValidationError("dataset needs one record per basis");
  const int d = dim();
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (bases[k].dim() != d) throw ValidationError("dataset bases have different dimensions");
    bases[k].validate(1e-8);
    const CountRecord& r = records[k];
    if (static_cast<int>(r.counts.size()) != d || static_cast<int>(r.frequencies.size()) != d) {
      throw ValidationError("record " + std::to_string(k) + " has the wrong number of outcomes");
    }
    if (r.total() <= 0) throw ValidationError("record " + std::to_string(k) + " has no clicks");
    double s = 0.0;
    for (double f : r.frequencies) {
      if (!(f >= 0.0)) throw ValidationError("frequencies must be nonnegative");
      s += f;
    }
    if (std::abs(s - 1.0) > 1e-9) {
      throw ValidationError("record " + std::to_string(k) + " frequencies do not sum to 1");
    }
  }
}

MeasurementBasis haar_unitary(int d, Rng& rng) {
  if (d < 1) throw ValidationError("basis dimension must be >= 1");
  ComplexMatrix g(d, d);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(s * re, s * im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
  }
  MeasurementBasis basis;
  basis.vectors = std::move(q);
  return basis;
}

MeasurementBasis haar_unitary(int d, std::uint64_t seed) {
  Rng rng(seed);
  MeasurementBasis basis = haar_unitary(d, rng);
  basis.seed = seed;
  return basis;
}

std::vector<double> born_probabilities(const DensityMatrix& rho, const MeasurementBasis& basis) {
  const int d = rho.dim();
  if (basis.dim() != d) throw ValidationError("basis and state dimensions differ");
  std::vector<double> p(static_cast<std::size_t>(d));
  kernels::hermitian_forms(reinterpret_cast<const double*>(rho.matrix().data()),
                           reinterpret_cast<const double*>(basis.vectors.data()),
                           static_cast<std::size_t>(d), static_cast<std::size_t>(d), p.data());
  double total = 0.0;
  for (double& v : p) {
    if (v < -1e-10) throw NumericalError("negative Born probability", v);
    v = std::clamp(v, 0.0, 1.0);
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw NumericalError("Born probabilities do not sum to 1", total);
  return p;
}

double expected_converted_counts(const DensityMatrix& rho, const ComplexVector& mode,
                                 const QpgConfig& config) {
  if (mode.size() != rho.dim()) throw ValidationError("mode and state dimensions differ");
  if (std::abs(mode.norm() - 1.0) > 1e-9) throw ValidationError("mode must have unit norm");
  const double overlap = mode.dot(rho.matrix() * mode).real();
  return static_cast<double>(config.clicks_per_basis) * config.eta() * overlap;
}

std::vector<long long> largest_remainder_counts(const std::vector<double>& probabilities,
                                                long long total) {
  const std::size_t n = probabilities.size();
  std::vector<long long> counts(n);
  std::vector<double> remainder(n);
  long long assigned = 0;
  for (std::size_t l = 0; l < n; ++l) {
    const double exact = probabilities[l] * static_cast<double>(total);
    counts[l] = static_cast<long long>(std::floor(exact));
    remainder[l] = exact - static_cast<double>(counts[l]);
    assigned += counts[l];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % n) {
    ++counts[order[i]];
    ++assigned;
  }
  for (std::size_t i = n; assigned > total; ) {
    // only reachable through rounding when probabilities sum slightly above 1
    i = (i == 0 ? n : i) - 1;
    if (counts[order[i]] > 0) {
      --counts[order[i]];
      --assigned;
    }
  }
  return counts;
}

std::vector<long long> multinomial(const std::vector<double>& probabilities, long long total,
                                   Rng& rng) {
  std::vector<long long> counts(probabilities.size(), 0);
  long long remaining = total;
  double mass = 1.0;
  for (std::size_t l = 0; l + 1 < probabilities.size() && remaining > 0; ++l) {
    const double q = mass > 0.0 ? std::clamp(probabilities[l] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<long long> draw(remaining, q);
    counts[l] = draw(rng);
    remaining -= counts[l];
    mass -= probabilities[l];
  }
  if (!probabilities.empty()) counts.back() += remaining;
  return counts;
}

CountRecord simulate_basis_measurement(const DensityMatrix& rho, const MeasurementBasis& basis,
                                       int basis_index, const QpgConfig& config, Rng& rng) {
  if (config.clicks_per_basis <= 0) throw ValidationError("cannot simulate an empty record");
  const std::vector<double> p = born_probabilities(rho, basis);
  if (config.noiseless) {
    CountRecord r;
    r.basis_index = basis_index;
    r.counts = largest_remainder_counts(p, config.clicks_per_basis);
    r.frequencies = p;
    return r;
  }
  return CountRecord::from_counts(basis_index, multinomial(p, config.clicks_per_basis, rng));
}

std::vector<CountRecord> mix_count_records(const std::vector<std::vector<CountRecord>>& sets,
                                           const std::vector<double>& weights) {
  if (sets.empty() || sets.size() != weights.size()) {
    throw ValidationError("mixing needs one weight per record set");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("mixing weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw ValidationError("mixing weights must sum to 1");
  const std::size_t bases = sets.front().size();
  for (const auto& s : sets) {
    if (s.size() != bases) throw ValidationError("record sets cover different bases");
  }
  std::vector<CountRecord> out;
  for (std::size_t k = 0; k < bases; ++k) {
    const CountRecord& first = sets.front()[k];
    const std::size_t d = first.frequencies.size();
    const long long total = first.total();
    std::vector<double> mixed(d, 0.0);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const CountRecord& r = sets[i][k];
      if (r.basis_index != first.basis_index || r.frequencies.size() != d) {
        throw ValidationError("record sets were not measured on the same bases");
      }
      for (std::size_t l = 0; l < d; ++l) mixed[l] += weights[i] * r.frequencies[l];
    }
    CountRecord m;
    m.basis_index = first.basis_index;
    m.counts = largest_remainder_counts(mixed, total);
    m.frequencies = std::move(mixed);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace rctomo
