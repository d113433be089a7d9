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

// Dense complex linear algebra for the small (d <= ~32) Hermitian matrices used
// throughout the library. Everything here is a pure function of its inputs.

#include <complex>

#include <Eigen/Dense>

namespace rctomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Square complex matrix that is Hermitian by construction: the constructor
/// replaces its argument by (A + A^dagger) / 2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m);

  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const RealVector& entries);
  /// |v><v| for an arbitrary (not necessarily normalized) vector.
  static HermitianMatrix projector(const ComplexVector& v);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator*(double scale) const;

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns, unitary
};

/// Spectral decomposition m = V diag(values) V^dagger with ascending eigenvalues.
/// Each eigenvector is rotated so that its first component with modulus above
/// 1e-12 is real and positive, which makes the output reproducible.
/// Throws NumericalError (diagnostic = residual Frobenius norm) if the solver
/// does not converge or the reconstruction misses 1e-10 * dim.
EigenDecomposition eig_hermitian(const HermitianMatrix& m);

/// Eigenvalues only, ascending.
RealVector eigenvalues(const HermitianMatrix& m);

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-10, 0) are clamped
/// to zero; anything more negative raises NumericalError carrying the eigenvalue.
HermitianMatrix matrix_sqrt_psd(const HermitianMatrix& m);

/// Largest |eigenvalue|.
double spectral_norm(const HermitianMatrix& m);

/// Frobenius inner product Re tr(a^dagger b).
double frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Euclidean projection of a real vector onto the probability simplex.
RealVector project_to_simplex(const RealVector& v);

// Real coordinates of Hermitian matrices.
//
// Herm(d) is a d^2-dimensional real vector space. We use the orthonormal basis
// (w.r.t. the Frobenius inner product)
//   E_aa                               (d diagonal elements)
//   (e_a e_b^T + e_b e_a^T) / sqrt 2   (a < b)
//   i (e_a e_b^T - e_b e_a^T) / sqrt 2 (a < b)
// ordered as: diagonal first, then for each pair a < b (row-major) the
// symmetric element followed by the antisymmetric one.

/// Number of real coordinates of a d x d Hermitian matrix.
constexpr int real_dimension(int dim) { return dim * dim; }

RealVector to_real_coordinates(const ComplexMatrix& h);
ComplexMatrix from_real_coordinates(const RealVector& x, int dim);

/// The k-th orthonormal basis element in the ordering above.
ComplexMatrix real_basis_element(int index, int dim);

}  // namespace rctomo
