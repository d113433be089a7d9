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

#include "rctomo/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rctomo/errors.hpp"

namespace rctomo {

BasisLabel BasisLabel::hg_modes(double fwhm_thz) {
  BasisLabel label;
  label.kind = BasisKind::kHgMode;
  label.fwhm_thz = fwhm_thz;
  return label;
}

BasisLabel BasisLabel::frequency_bins(int count, double first_center_thz, double spacing_thz) {
  BasisLabel label;
  label.kind = BasisKind::kFrequencyBin;
  label.bin_width_thz = spacing_thz;
  for (int i = 0; i < count; ++i) label.bin_centers_thz.push_back(first_center_thz + i * spacing_thz);
  return label;
}

void BasisLabel::validate() const {
  if (kind == BasisKind::kFrequencyBin) {
    for (std::size_t i = 1; i < bin_centers_thz.size(); ++i) {
      if (!(bin_centers_thz[i] > bin_centers_thz[i - 1])) {
        throw ValidationError("frequency bin centers must be strictly increasing");
      }
    }
  }
}

DensityMatrix::DensityMatrix(HermitianMatrix m, BasisLabel label)
    : m_(std::move(m)), label_(std::move(label)) {
  if (m_.dim() < 1) throw ValidationError("density matrix must have dimension >= 1");
  const double tr = m_.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    throw ValidationError("density matrix trace is " + std::to_string(tr) + ", expected 1");
  }
  const double lowest = eigenvalues(m_)(0);
  if (lowest < -kPsdTolerance) {
    throw ValidationError("density matrix has negative eigenvalue " + std::to_string(lowest));
  }
  label_.validate();
}

DensityMatrix DensityMatrix::maximally_mixed(int dim, BasisLabel label) {
  return DensityMatrix(HermitianMatrix::identity(dim) * (1.0 / dim), std::move(label));
}

DensityMatrix DensityMatrix::with_label(BasisLabel label) const {
  DensityMatrix copy = *this;
  label.validate();
  copy.label_ = std::move(label);
  return copy;
}

int StateSpec::dim() const {
  return components.empty() ? 0 : static_cast<int>(components.front().amplitudes.size());
}

void StateSpec::validate() const {
  if (components.empty()) throw ValidationError("state needs at least one component");
  const int d = dim();
  if (d < 1) throw ValidationError("state dimension must be >= 1");
  double total = 0.0;
  for (const StateComponent& c : components) {
    if (c.amplitudes.size() != d) throw ValidationError("state components have different dimensions");
    if (!(c.weight >= 0.0)) throw ValidationError("state weights must be nonnegative");
    if (std::abs(c.amplitudes.norm() - 1.0) > 1e-12) {
      throw ValidationError("state component amplitudes must have unit norm");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("state weights sum to " + std::to_string(total) + ", expected 1");
  }
  label.validate();
}

ComplexVector basis_vector(int n, int d) {
  if (d < 1 || n < 0 || n >= d) {
    throw ValidationError("mode index " + std::to_string(n) + " out of range for dimension " +
                          std::to_string(d));
  }
  ComplexVector v = ComplexVector::Zero(d);
  v(n) = 1.0;
  return v;
}

DensityMatrix hg_pure_state(int n, int d) {
  return DensityMatrix(HermitianMatrix::projector(basis_vector(n, d)), BasisLabel::hg_modes());
}

DensityMatrix mixture(const StateSpec& spec) {
  spec.validate();
  const int d = spec.dim();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (const StateComponent& c : spec.components) {
    m += c.weight * (c.amplitudes * c.amplitudes.adjoint());
  }
  return DensityMatrix(HermitianMatrix(m), spec.label);
}

ComplexVector bin_superposition_vector(const std::vector<int>& indices,
                                       const std::vector<int>& signs, int d) {
  if (indices.empty()) throw ValidationError("superposition needs at least one bin");
  if (indices.size() != signs.size()) {
    throw ValidationError("superposition needs one sign per bin");
  }
  std::set<int> seen;
  ComplexVector v = ComplexVector::Zero(d);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (!seen.insert(indices[i]).second) throw ValidationError("duplicate bin index in superposition");
    if (signs[i] != 1 && signs[i] != -1) throw ValidationError("superposition signs must be +1 or -1");
    v += static_cast<double>(signs[i]) * basis_vector(indices[i], d);
  }
  return v / std::sqrt(static_cast<double>(indices.size()));
}

DensityMatrix frequency_bin_superposition(const std::vector<int>& indices,
                                          const std::vector<int>& signs, int d) {
  return DensityMatrix(HermitianMatrix::projector(bin_superposition_vector(indices, signs, d)),
                       BasisLabel::frequency_bins(d));
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("fidelity needs states of equal dimension");
  // Work on the support of a: M = D^1/2 V^dag b V D^1/2 over eigenvalues of a
  // above kCut * max. Rounding noise in discarded eigenvalues would otherwise
  // enter through a square root and cost ~1e-8 for pure states.
  constexpr double kCut = 1e-13;
  const EigenDecomposition ea = eig_hermitian(a.hermitian());
  const double top = ea.values.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ea.values.size(); ++i) {
    if (ea.values(i) > kCut * top) keep.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  ComplexMatrix scaled(a.dim(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = keep[static_cast<std::size_t>(j)];
    scaled.col(j) = ea.vectors.col(i) * std::sqrt(ea.values(i));
  }
  const RealVector ev = eigenvalues(HermitianMatrix(scaled.adjoint() * b.matrix() * scaled));
  const double ev_top = std::max(ev.maxCoeff(), 0.0);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > kCut * ev_top) s += std::sqrt(ev(i));
  }
  return std::clamp(s * s, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("trace distance needs states of equal dimension");
  return 0.5 * eigenvalues(a.hermitian() - b.hermitian()).cwiseAbs().sum();
}

int numerical_rank(const DensityMatrix& m, double tol) {
  const RealVector ev = eigenvalues(m.hermitian());
  return static_cast<int>((ev.array() > tol).count());
}

int degrees_of_freedom(int d, int r) { return (2 * d - r) * r - 1; }

StateSpec hg_three_mode_mixture(int d) {
  StateSpec spec;
  spec.label = BasisLabel::hg_modes();
  spec.components = {{basis_vector(0, d), 0.17}, {basis_vector(1, d), 0.70}, {basis_vector(2, d), 0.13}};
  return spec;
}

std::array<int, 3> bin_superposition_signs(int which) {
  static constexpr std::array<std::array<int, 3>, 4> kSigns{
      {{1, 1, 1}, {1, -1, 1}, {1, 1, -1}, {-1, 1, 1}}};
  if (which < 0 || which >= 4) throw ValidationError("superposition index must be in [0, 4)");
  return kSigns[static_cast<std::size_t>(which)];
}

namespace {

ComplexVector superposition_amplitudes(int which, int d) {
  const std::array<int, 3> s = bin_superposition_signs(which);
  return bin_superposition_vector({kSuperpositionBins.begin(), kSuperpositionBins.end()},
                                  {s.begin(), s.end()}, d);
}

}  // namespace

StateSpec bin_superposition_state(int which, int d) {
  StateSpec spec;
  spec.label = BasisLabel::frequency_bins(d);
  spec.components = {{superposition_amplitudes(which, d), 1.0}};
  return spec;
}

double mixture_weight_for_eigenvalue(double larger_eigenvalue, double overlap) {
  // lambda_+ = (1 + sqrt(1 - 4 w (1 - w) (1 - overlap))) / 2
  const double root = 2.0 * larger_eigenvalue - 1.0;
  const double product = (1.0 - root * root) / (4.0 * (1.0 - overlap));
  const double disc = 1.0 - 4.0 * product;
  if (!(overlap < 1.0) || !(root >= 0.0) || disc < 0.0) {
    throw ValidationError("eigenvalue not attainable by mixing the two states");
  }
  return 0.5 * (1.0 + std::sqrt(disc));
}

StateSpec bin_two_superposition_mixture(double larger_eigenvalue, int d) {
  const ComplexVector first = superposition_amplitudes(0, d);
  const ComplexVector second = superposition_amplitudes(1, d);
  const double overlap = std::norm(first.dot(second));
  const double w = mixture_weight_for_eigenvalue(larger_eigenvalue, overlap);
  StateSpec spec;
  spec.label = BasisLabel::frequency_bins(d);
  spec.components = {{first, w}, {second, 1.0 - w}};
  return spec;
}

StateSpec random_rank_state(StateFamily family, int rank, int d, Rng& rng) {
  const int pool = family == StateFamily::kHgModes ? std::max(4, rank) : 4;
  if (rank < 1) throw ValidationError("rank must be >= 1");
  if (family == StateFamily::kHgModes && pool > d) {
    throw ValidationError("dimension too small for the requested HG rank");
  }
  if (family == StateFamily::kFrequencyBins && (rank > 3 || d < 7)) {
    throw ValidationError("frequency-bin states need rank <= 3 and dimension >= 7");
  }
  std::vector<int> order(static_cast<std::size_t>(pool));
  std::iota(order.begin(), order.end(), 0);
  for (int i = pool - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  const std::vector<double> weights = dirichlet_uniform(rng, rank);
  StateSpec spec;
  spec.label = family == StateFamily::kHgModes ? BasisLabel::hg_modes() : BasisLabel::frequency_bins(d);
  for (int i = 0; i < rank; ++i) {
    const int which = order[static_cast<std::size_t>(i)];
    spec.components.push_back({family == StateFamily::kHgModes ? basis_vector(which, d)
                                                               : superposition_amplitudes(which, d),
                               weights[static_cast<std::size_t>(i)]});
  }
  return spec;
}

}  // namespace rctomo
