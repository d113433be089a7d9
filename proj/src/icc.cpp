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

#include "rctomo/icc.hpp"

#include <algorithm>
#include <cmath>

#include "rctomo/errors.hpp"
#include "rctomo/sdp.hpp"

namespace rctomo {

HermitianMatrix random_full_rank_z(int d, Rng& rng) {
  if (d < 1) throw ValidationError("witness dimension must be >= 1");
  HermitianMatrix z;
  for (int attempt = 0; attempt < 100; ++attempt) {
    ComplexMatrix g(d, d);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < d; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        g(i, j) = Complex(re, im);
      }
    }
    z = HermitianMatrix(g);
    const RealVector ev = eigenvalues(z);
    const double norm = ev.cwiseAbs().maxCoeff();
    if (ev.cwiseAbs().minCoeff() > 1e-3 * norm) return z * (1.0 / norm);
  }
  const RealVector ev = eigenvalues(z);
  z = z + HermitianMatrix::identity(d) * (ev.cwiseAbs().maxCoeff() + 1.0);
  return z * (1.0 / spectral_norm(z));
}

double ic_threshold(const HermitianMatrix& z, double relative) {
  const RealVector ev = eigenvalues(z);
  return relative * (ev(ev.size() - 1) - ev(0));
}

std::vector<std::vector<double>> binomial_bands(const std::vector<std::vector<double>>& p_hat,
                                                long long clicks, double sigmas) {
  if (clicks <= 0) throw ValidationError("bands need a positive click count");
  std::vector<std::vector<double>> out;
  for (const auto& p : p_hat) {
    std::vector<double> band;
    for (double v : p) {
      const double q = std::clamp(v, 0.0, 1.0);
      band.push_back(sigmas * std::sqrt(q * (1.0 - q) / static_cast<double>(clicks)));
    }
    out.push_back(std::move(band));
  }
  return out;
}

void IccProblem::validate() const {
  const int d = z.dim();
  if (d < 1) throw ValidationError("ICC needs a witness matrix");
  if (eigenvalues(z).cwiseAbs().minCoeff() <= 1e-6) {
    throw ValidationError("ICC witness must be full rank");
  }
  if (p_hat.size() != bases.size()) throw ValidationError("ICC needs one probability vector per basis");
  if (!tolerance.empty() && tolerance.size() != bases.size()) {
    throw ValidationError("ICC tolerances must cover every basis");
  }
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (bases[k].dim() != d) throw ValidationError("ICC basis dimension differs from the witness");
    if (static_cast<int>(p_hat[k].size()) != d) throw ValidationError("ICC probability vector length");
    double s = 0.0;
    for (double v : p_hat[k]) s += v;
    if (std::abs(s - 1.0) > 1e-9) throw ValidationError("ICC probabilities must sum to 1");
    if (!tolerance.empty()) {
      if (static_cast<int>(tolerance[k].size()) != d) throw ValidationError("ICC tolerance length");
      for (double t : tolerance[k]) {
        if (!(t >= 0.0)) throw ValidationError("ICC tolerances must be nonnegative");
      }
    }
  }
  if (center && center->dim() != d) throw ValidationError("ICC center dimension differs");
}

namespace {

struct Constraint {
  RealVector row;    // real coordinates of |b><b|
  double deviation;  // <b|center|b> - p_hat
  double band;       // 0 for equalities
  int basis;
  int outcome;
};

RealMatrix null_space(const RealMatrix& rows, int n, double rel_tol) {
  if (rows.rows() == 0) return RealMatrix::Identity(n, n);
  Eigen::JacobiSVD<RealMatrix> svd(rows, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

IccCertificate solve_extrema(const IccProblem& problem, const IccOptions& options) {
  problem.validate();
  const int d = problem.z.dim();
  const int n = real_dimension(d);
  const DensityMatrix center = problem.center ? *problem.center : DensityMatrix::maximally_mixed(d);
  if (eigenvalues(center.hermitian())(0) <= 0.0) {
    throw NumericalError("ICC center must be positive definite", eigenvalues(center.hermitian())(0));
  }

  std::vector<Constraint> equalities;
  std::vector<Constraint> bands;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t k = 0; k < problem.bases.size(); ++k) {
    const std::vector<double> p = born_probabilities(center, problem.bases[k]);
    for (int l = 0; l < d; ++l) {
      const ComplexVector b = problem.bases[k].vector(l);
      const double band = problem.tolerance.empty() ? 0.0 : problem.tolerance[k][static_cast<std::size_t>(l)];
      Constraint c{to_real_coordinates(b * b.adjoint()),
                   p[static_cast<std::size_t>(l)] - problem.p_hat[k][static_cast<std::size_t>(l)], band,
                   static_cast<int>(k), l};
      const double excess = std::abs(c.deviation) - (band > 0.0 ? band : 1e-9);
      if (excess > worst) {
        worst = excess;
        worst_name = "basis " + std::to_string(k) + " outcome " + std::to_string(l);
      }
      (band > 0.0 ? bands : equalities).push_back(std::move(c));
    }
  }
  if (worst > 0.0) {
    throw ValidationError("ICC center violates the constraint at " + worst_name + " by " +
                          std::to_string(worst));
  }

  RealMatrix rows(static_cast<Eigen::Index>(equalities.size()) + 1, n);
  rows.row(0) = to_real_coordinates(ComplexMatrix::Identity(d, d)).transpose();
  for (std::size_t i = 0; i < equalities.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i) + 1) = equalities[i].row.transpose();
  }
  const RealMatrix null = null_space(rows, n, options.null_tolerance);
  const int m = static_cast<int>(null.cols());

  IccCertificate cert;
  cert.free_parameters = m;
  cert.threshold = ic_threshold(problem.z, options.relative_threshold);
  const double center_value = frobenius_inner(problem.z.matrix(), center.matrix());
  if (m == 0) {
    cert.f_min = cert.f_max = center_value;
    cert.rho_min = cert.rho_max = center;
    cert.is_ic = is_informationally_complete(cert, cert.threshold);
    return cert;
  }

  std::vector<ComplexMatrix> directions;
  for (int i = 0; i < m; ++i) directions.push_back(from_real_coordinates(null.col(i), d));

  const int q = 2 * static_cast<int>(bands.size());
  RealVector lp_c(q);
  RealMatrix lp_a(m, q);
  for (std::size_t j = 0; j < bands.size(); ++j) {
    const RealVector slope = null.transpose() * bands[j].row;
    const Eigen::Index up = static_cast<Eigen::Index>(2 * j);
    lp_c(up) = bands[j].band - bands[j].deviation;
    lp_c(up + 1) = bands[j].band + bands[j].deviation;
    lp_a.col(up) = slope;
    lp_a.col(up + 1) = -slope;
  }

  SdpOptions sdp_options;
  sdp_options.gap_tolerance = options.solver_gap;
  sdp_options.max_iterations = options.max_iterations;

  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    const ComplexMatrix objective = sign * problem.z.matrix();
    // maximize -sign <Z, sum y_i N_i>  over  rho = center + sum y_i N_i
    SdpProblem sdp;
    sdp.c = center.matrix();
    sdp.b.resize(m);
    for (int i = 0; i < m; ++i) {
      sdp.a.push_back(-directions[static_cast<std::size_t>(i)]);
      sdp.b(i) = -frobenius_inner(objective, directions[static_cast<std::size_t>(i)]);
    }
    sdp.lp_c = lp_c;
    sdp.lp_a = lp_a;
    // <N_i, I> = 0 and the LP pairs cancel, so this start satisfies A(X) + L x = b.
    const double lowest = eigenvalues(HermitianMatrix(objective))(0);
    SdpStart start{objective + (1.0 - lowest) * ComplexMatrix::Identity(d, d), RealVector::Ones(q)};
    const SdpSolution sol = solve_sdp(sdp, start, sdp_options);
    if (!(sol.gap < options.certified_gap)) {
      throw NumericalError("ICC semidefinite program did not reach the certified gap", sol.gap);
    }
    const DensityMatrix extremal(HermitianMatrix(sol.s), center.label());
    const double value = frobenius_inner(problem.z.matrix(), extremal.matrix());
    cert.duality_gaps[static_cast<std::size_t>(side)] = sol.gap;
    cert.iterations[static_cast<std::size_t>(side)] = sol.iterations;
    if (side == 0) {
      cert.f_min = value;
      cert.rho_min = extremal;
    } else {
      cert.f_max = value;
      cert.rho_max = extremal;
    }
  }

  for (const DensityMatrix* rho : {&cert.rho_min, &cert.rho_max}) {
    for (std::size_t k = 0; k < problem.bases.size(); ++k) {
      const std::vector<double> p = born_probabilities(*rho, problem.bases[k]);
      for (std::size_t l = 0; l < p.size(); ++l) {
        const double band = problem.tolerance.empty() ? 0.0 : problem.tolerance[k][l];
        cert.max_violation =
            std::max(cert.max_violation, std::abs(p[l] - problem.p_hat[k][l]) - band);
      }
    }
  }
  cert.max_violation = std::max(cert.max_violation, 0.0);
  cert.s_cvx = cert.f_max - cert.f_min;
  if (cert.s_cvx < 0.0) {
    if (cert.s_cvx < -1e-9) throw NumericalError("ICC extrema are out of order", cert.s_cvx);
    cert.s_cvx = 0.0;
  }
  cert.is_ic = is_informationally_complete(cert, cert.threshold);
  return cert;
}

bool is_informationally_complete(const IccCertificate& cert, double threshold) {
  return cert.s_cvx < threshold;
}

}  // namespace rctomo
