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

#include "rctomo/hermitian.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

#include "rctomo/density_matrix.hpp"
#include "rctomo/errors.hpp"

namespace rctomo {

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ValidationError("Hermitian matrix must be square with dimension >= 1");
  }
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& entries) {
  return HermitianMatrix(entries.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianMatrix HermitianMatrix::projector(const ComplexVector& v) {
  return HermitianMatrix(v * v.adjoint());
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  return HermitianMatrix(m_ + other.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  return HermitianMatrix(m_ - other.m_);
}

HermitianMatrix HermitianMatrix::operator*(double scale) const {
  return HermitianMatrix(m_ * scale);
}

EigenDecomposition eig_hermitian(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge",
                         std::numeric_limits<double>::infinity());
  }
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  const int n = m.dim();
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      const double mag = std::abs(out.vectors(r, c));
      if (mag > 1e-12) {
        out.vectors.col(c) *= std::conj(out.vectors(r, c)) / mag;
        out.vectors(r, c) = Complex(out.vectors(r, c).real(), 0.0);
        break;
      }
    }
  }
  const double residual =
      (out.vectors * out.values.cast<Complex>().asDiagonal() * out.vectors.adjoint() - m.matrix())
          .norm();
  const double scale = std::max(1.0, m.matrix().norm());
  if (!(residual < 1e-10 * n * scale)) {
    throw NumericalError("Hermitian eigendecomposition residual too large", residual);
  }
  return out;
}

RealVector eigenvalues(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge",
                         std::numeric_limits<double>::infinity());
  }
  return solver.eigenvalues();
}

HermitianMatrix matrix_sqrt_psd(const HermitianMatrix& m) {
  const EigenDecomposition eig = eig_hermitian(m);
  RealVector roots(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (v < -1e-10) throw NumericalError("matrix is not PSD", v);
    roots(i) = std::sqrt(std::max(v, 0.0));
  }
  return HermitianMatrix(eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint());
}

double spectral_norm(const HermitianMatrix& m) {
  const RealVector ev = eigenvalues(m);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

RealVector project_to_simplex(const RealVector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += sorted[static_cast<std::size_t>(i)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) shift = candidate;
  }
  return (v.array() - shift).max(0.0).matrix();
}

DensityMatrix project_to_state_space(const HermitianMatrix& m) {
  const EigenDecomposition eig = eig_hermitian(m);
  const RealVector p = project_to_simplex(eig.values);
  return DensityMatrix(
      HermitianMatrix(eig.vectors * p.cast<Complex>().asDiagonal() * eig.vectors.adjoint()));
}

RealVector to_real_coordinates(const ComplexMatrix& h) {
  const int d = static_cast<int>(h.rows());
  RealVector x(real_dimension(d));
  const double s = std::sqrt(2.0);
  int idx = 0;
  for (int a = 0; a < d; ++a) x(idx++) = h(a, a).real();
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      x(idx++) = s * h(a, b).real();
      x(idx++) = s * h(a, b).imag();
    }
  }
  return x;
}

ComplexMatrix from_real_coordinates(const RealVector& x, int dim) {
  if (x.size() != real_dimension(dim)) {
    throw ValidationError("real coordinate vector has the wrong length");
  }
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  const double s = 1.0 / std::sqrt(2.0);
  int idx = 0;
  for (int a = 0; a < dim; ++a) h(a, a) = x(idx++);
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      const Complex v(s * x(idx), s * x(idx + 1));
      idx += 2;
      h(a, b) = v;
      h(b, a) = std::conj(v);
    }
  }
  return h;
}

ComplexMatrix real_basis_element(int index, int dim) {
  RealVector x = RealVector::Zero(real_dimension(dim));
  x(index) = 1.0;
  return from_real_coordinates(x, dim);
}

}  // namespace rctomo
