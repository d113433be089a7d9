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

#include "rctomo/mle.hpp"

#include <cmath>
#include <limits>

#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"

namespace rctomo {
namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEigenvalueFloor = 1e-13;

// Outcomes with positive weight in real coordinates: p = A x.
struct Likelihood {
  int dim = 0;
  int n = 0;
  RowMajorMatrix rows;
  RealVector weight;
  RealVector reference;  // observed frequency of each row
  double offset = 0.0;   // sum w log(reference)

  explicit Likelihood(const Dataset& data) : dim(data.dim()), n(real_dimension(data.dim())) {
    std::vector<RealVector> a;
    std::vector<double> w;
    std::vector<double> nu;
    for (std::size_t k = 0; k < data.size(); ++k) {
      const CountRecord& r = data.records[k];
      const double total = static_cast<double>(r.total());
      for (int l = 0; l < dim; ++l) {
        const double f = r.frequencies[static_cast<std::size_t>(l)];
        if (f <= 0.0) continue;
        const ComplexVector b = data.bases[k].vector(l);
        a.push_back(to_real_coordinates(b * b.adjoint()));
        w.push_back(total * f);
        nu.push_back(f);
      }
    }
    rows.resize(static_cast<Eigen::Index>(a.size()), n);
    weight.resize(static_cast<Eigen::Index>(a.size()));
    reference.resize(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = a[i].transpose();
      weight(static_cast<Eigen::Index>(i)) = w[i];
      reference(static_cast<Eigen::Index>(i)) = nu[i];
      offset += w[i] * std::log(nu[i]);
    }
  }

  Eigen::Index size() const { return rows.rows(); }

  RealVector probabilities(const RealVector& x) const {
    RealVector p(size());
    for (Eigen::Index i = 0; i < size(); ++i) {
      p(i) = kernels::dot(rows.row(i).data(), x.data(), static_cast<std::size_t>(n));
    }
    return p;
  }

  // Likelihood minus `offset`, written so that it stays accurate near the optimum.
  double shifted(const RealVector& p) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (!(p(i) > 0.0)) return kNegInf;
      s += weight(i) * std::log1p((p(i) - reference(i)) / reference(i));
    }
    return s;
  }

  double total_weight() const { return weight.sum(); }
};

// A previous optimum usually has eigenvalues at the floor. Mixing it with I/d
// puts the start close to the central path at the initial barrier weight.
constexpr double kWarmStartBlend = 1e-3;

double log_det(const ComplexMatrix& rho) {
  const RealVector ev = eigenvalues(HermitianMatrix(rho));
  if (!(ev(0) > kEigenvalueFloor)) return kNegInf;
  return ev.array().log().sum();
}

std::vector<std::vector<double>> fitted_probabilities(const DensityMatrix& rho,
                                                      const Dataset& data) {
  std::vector<std::vector<double>> out;
  for (const MeasurementBasis& b : data.bases) out.push_back(born_probabilities(rho, b));
  return out;
}

MlResult finish(const ComplexMatrix& rho, const Dataset& data, int iterations, bool converged,
                std::vector<double> history) {
  MlResult result{DensityMatrix(HermitianMatrix(rho / rho.trace().real())), {}, 0.0, iterations,
                  converged, std::move(history)};
  result.p_hat = fitted_probabilities(result.rho_ml, data);
  result.log_likelihood = log_likelihood(result.rho_ml, data);
  return result;
}

MlResult barrier_newton(const Dataset& data, const MlOptions& options, const ComplexMatrix& start) {
  const Likelihood lik(data);
  const int d = lik.dim;
  const int n = lik.n;
  const int max_it = options.max_iterations > 0 ? options.max_iterations : 2000;

  if (d == 1) {
    const double l1 = lik.shifted(lik.probabilities(RealVector::Ones(1))) + lik.offset;
    return finish(ComplexMatrix::Identity(1, 1), data, 0, true, {l1});
  }

  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) basis.push_back(real_basis_element(i, d));
  // Trace-zero directions split into those some outcome sees (S) and those none
  // does (U). Along U the likelihood is exactly flat: H vanishes on U and g has
  // no U component, so both are dropped rather than kept as rounding noise.
  const RealVector trace_row = to_real_coordinates(ComplexMatrix::Identity(d, d));
  const RealMatrix tangent = Eigen::HouseholderQR<RealMatrix>(trace_row)
                                 .householderQ() * RealMatrix::Identity(n, n).rightCols(n - 1);
  RealMatrix seen, unseen;
  {
    const Eigen::JacobiSVD<RealMatrix> svd(RealMatrix(lik.rows * tangent), Eigen::ComputeFullV);
    const RealVector sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-10 * sv(0)) ++rank;
    seen = tangent * svd.matrixV().leftCols(rank);
    unseen = tangent * svd.matrixV().rightCols(n - 1 - rank);
  }
  const auto ns = seen.cols();
  const auto nu = unseen.cols();

  // A warm start on the boundary (zero eigenvalue or zero probability for an
  // observed outcome) is pulled toward I/d just enough to become interior.
  const ComplexMatrix mixed = ComplexMatrix::Identity(d, d) / double(d);
  RealVector x = to_real_coordinates(start);
  double lx = lik.shifted(lik.probabilities(x));
  for (double blend = 1e-12; !std::isfinite(lx) || !std::isfinite(log_det(from_real_coordinates(x, d)));
       blend *= 10.0) {
    if (blend > 1.0) throw NumericalError("likelihood start point is not interior", lx);
    x = to_real_coordinates((1.0 - blend) * start + blend * mixed);
    lx = lik.shifted(lik.probabilities(x));
  }
  std::vector<double> history{lx + lik.offset};
  double mu = lik.total_weight() / d * 1e-2;
  const double stop_level = options.tolerance * lik.total_weight();

  bool converged = false;
  int it = 0;
  while (it < max_it) {
    ++it;
    const RealVector p = lik.probabilities(x);
    RealVector g = RealVector::Zero(n);
    RowMajorMatrix h = RowMajorMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < lik.size(); ++i) {
      const double wp = lik.weight(i) / p(i);
      g += wp * lik.rows.row(i).transpose();
      kernels::rank1_update(h.data(), lik.rows.row(i).data(), wp / p(i), static_cast<std::size_t>(n));
    }
    const ComplexMatrix rho = from_real_coordinates(x, d);
    Eigen::LLT<ComplexMatrix> chol(rho);
    if (chol.info() != Eigen::Success) throw NumericalError("likelihood iterate lost positivity", 0.0);
    const ComplexMatrix inv_rho = chol.solve(ComplexMatrix::Identity(d, d));
    const ComplexMatrix x_inv = 0.5 * (inv_rho + inv_rho.adjoint());
    RealMatrix barrier_hess(n, n);
    for (int i = 0; i < n; ++i) {
      barrier_hess.col(i) = to_real_coordinates(x_inv * basis[static_cast<std::size_t>(i)] * x_inv);
    }
    const RealVector barrier_grad = to_real_coordinates(x_inv);

    // Newton system in (S, U / sqrt(mu)) coordinates, where the curvatures ~w
    // on S and ~mu on U both become O(1) relative to their blocks.
    const RealMatrix bs = barrier_hess * seen;
    const RealMatrix bu = barrier_hess * unseen;
    const RealVector gs = seen.transpose() * g;
    RealVector dx;
    RealVector z;
    RealMatrix system(ns + nu, ns + nu);
    for (;;) {
      const double root = std::sqrt(mu);
      system.topLeftCorner(ns, ns) = seen.transpose() * (h * seen) + mu * (seen.transpose() * bs);
      system.topRightCorner(ns, nu) = root * (seen.transpose() * bu);
      system.bottomLeftCorner(nu, ns) = system.topRightCorner(ns, nu).transpose();
      system.bottomRightCorner(nu, nu) = unseen.transpose() * bu;
      RealVector rhs(ns + nu);
      rhs.head(ns) = gs + mu * (seen.transpose() * barrier_grad);
      rhs.tail(nu) = root * (unseen.transpose() * barrier_grad);
      const Eigen::LDLT<RealMatrix> ldlt(0.5 * (system + system.transpose()));
      if (ldlt.info() != Eigen::Success) throw NumericalError("likelihood Newton system is singular", mu);
      z = ldlt.solve(rhs);
      dx = seen * z.head(ns) + unseen * (z.tail(nu) / root);
      if (gs.dot(z.head(ns)) >= 0.0 || mu * d < stop_level) break;
      mu /= 10.0;
    }
    // No ascent direction left at the target barrier weight: L is maximal.
    const double ascent = gs.dot(z.head(ns));
    if (ascent < 0.0) {
      converged = true;
      break;
    }
    const double decrement = z.dot(system * z);

    // Largest step keeping rho + a dx positive definite, scaled by 0.9.
    const ComplexMatrix l_inv = chol.matrixL().solve(ComplexMatrix::Identity(d, d));
    const ComplexMatrix scaled = l_inv * from_real_coordinates(dx, d) * l_inv.adjoint();
    const double shrink = -eigenvalues(HermitianMatrix(scaled))(0);
    double alpha = shrink <= 0.9 ? 1.0 : 0.9 / shrink;

    const double phi0 = lx + mu * log_det(rho);
    bool accepted = false;
    int halvings = 0;
    RealVector xn;
    double ln = lx;
    for (; halvings < 60; ++halvings) {
      xn = x + alpha * dx;
      ln = lik.shifted(lik.probabilities(xn));
      const double ld = log_det(from_real_coordinates(xn, d));
      if (std::isfinite(ld) && ln >= lx && ln + mu * ld >= phi0) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (accepted) {
      x = xn;
      lx = ln;
      history.push_back(lx + lik.offset);
    }
    // The monotone-likelihood rule blocks centering (typically after a warm
    // start, or once L is flat to rounding level): tighten the barrier instead.
    const bool blocked = !accepted || halvings >= 10 || alpha * dx.cwiseAbs().maxCoeff() < 1e-14;
    if (blocked) {
      if (mu * d < stop_level * 1e4) {
        converged = true;
        break;
      }
      mu /= 10.0;
      continue;
    }
    // Centered when the Newton decrement of (L / mu + log det) is below 1/2.
    if (decrement < 0.25 * mu) {
      if (mu * d < stop_level) {
        converged = true;
        break;
      }
      mu /= 10.0;
    }
  }
  return finish(from_real_coordinates(x, d), data, it, converged, std::move(history));
}

MlResult diluted_rrho(const Dataset& data, const MlOptions& options, const ComplexMatrix& start) {
  const Likelihood lik(data);
  const int d = lik.dim;
  const int max_it = options.max_iterations > 0 ? options.max_iterations : 100000;
  std::vector<ComplexMatrix> projectors;
  for (Eigen::Index i = 0; i < lik.size(); ++i) {
    projectors.push_back(from_real_coordinates(lik.rows.row(i).transpose(), d));
  }
  const double total = lik.total_weight();

  ComplexMatrix rho = start;
  double lx = lik.shifted(lik.probabilities(to_real_coordinates(rho)));
  std::vector<double> history{lx + lik.offset};
  bool converged = false;
  int it = 0;
  while (it < max_it) {
    ++it;
    const RealVector p = lik.probabilities(to_real_coordinates(rho));
    ComplexMatrix r = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < lik.size(); ++i) {
      r += (lik.weight(i) / (p(i) * total)) * projectors[static_cast<std::size_t>(i)];
    }
    ComplexMatrix next = r * rho * r;
    next = 0.5 * (next + next.adjoint());
    next /= next.trace().real();
    double eps = 0.0;
    double ln = kNegInf;
    ComplexMatrix candidate;
    for (int ls = 0; ls < 60; ++ls) {
      candidate = (1.0 - eps) * next + eps * rho;
      ln = lik.shifted(lik.probabilities(to_real_coordinates(candidate)));
      if (ln >= lx) break;
      eps = 1.0 - 0.5 * (1.0 - eps);
    }
    if (!(ln >= lx)) {
      converged = true;
      break;
    }
    const double gain = ln - lx;
    rho = candidate;
    lx = ln;
    history.push_back(lx + lik.offset);
    if (gain < options.gain_tolerance) {
      converged = true;
      break;
    }
  }
  return finish(rho, data, it, converged, std::move(history));
}

}  // namespace

double log_likelihood(const DensityMatrix& rho, const Dataset& data) {
  double s = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::vector<double> p = born_probabilities(rho, data.bases[k]);
    const CountRecord& r = data.records[k];
    const double total = static_cast<double>(r.total());
    for (std::size_t l = 0; l < p.size(); ++l) {
      const double n = total * r.frequencies[l];
      if (n > 0.0) s += n * std::log(std::max(p[l], kLikelihoodFloor));
    }
  }
  return s;
}

MlResult maximize_likelihood(const Dataset& data, const MlOptions& options,
                             const std::optional<DensityMatrix>& warm_start) {
  data.validate();
  const int d = data.dim();
  const ComplexMatrix mixed = ComplexMatrix::Identity(d, d) / double(d);
  if (warm_start && warm_start->dim() != d) {
    throw ValidationError("warm start dimension differs from the data");
  }
  ComplexMatrix start = mixed;
  if (warm_start) start = (1.0 - kWarmStartBlend) * warm_start->matrix() + kWarmStartBlend * mixed;
  switch (options.algorithm) {
    case MlAlgorithm::kBarrierNewton:
      return barrier_newton(data, options, start);
    case MlAlgorithm::kDilutedRrho:
      return diluted_rrho(data, options, start);
  }
  throw ValidationError("unknown likelihood algorithm");
}

}  // namespace rctomo
