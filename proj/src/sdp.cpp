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

#include "rctomo/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"

namespace rctomo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Re tr(a b) for complex matrices.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b_adjoint) {
  return kernels::dot(reinterpret_cast<const double*>(a.data()),
                      reinterpret_cast<const double*>(b_adjoint.data()),
                      2 * static_cast<std::size_t>(a.size()));
}

// Largest t with m + t dm PSD (infinite when dm keeps m PSD for all t > 0).
double max_step(const Eigen::LLT<ComplexMatrix>& chol, const ComplexMatrix& dm) {
  const int d = static_cast<int>(dm.rows());
  const ComplexMatrix l_inv = chol.matrixL().solve(ComplexMatrix::Identity(d, d));
  const double lowest = eigenvalues(HermitianMatrix(l_inv * dm * l_inv.adjoint()))(0);
  return lowest >= 0.0 ? kInf : -1.0 / lowest;
}

double max_step(const RealVector& v, const RealVector& dv) {
  double t = kInf;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (dv(j) < 0.0) t = std::min(t, -v(j) / dv(j));
  }
  return t;
}

struct Direction {
  RealVector dy;
  ComplexMatrix ds;
  ComplexMatrix dx;
  RealVector lp_ds;
  RealVector lp_dx;
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpStart& start, const SdpOptions& options) {
  const int d = static_cast<int>(problem.c.rows());
  const int m = static_cast<int>(problem.a.size());
  const int q = static_cast<int>(problem.lp_c.size());
  if (problem.b.size() != m) throw ValidationError("SDP: objective length differs from constraint count");
  if (q > 0 && (problem.lp_a.rows() != m || problem.lp_a.cols() != q)) {
    throw ValidationError("SDP: LP coefficient block has the wrong shape");
  }
  if (start.x.rows() != d || start.lp_x.size() != q) throw ValidationError("SDP: start has the wrong shape");

  SdpSolution sol;
  sol.y = RealVector::Zero(m);
  sol.s = problem.c;
  sol.x = start.x;
  sol.lp_s = problem.lp_c;
  sol.lp_x = start.lp_x;

  const ComplexMatrix identity = ComplexMatrix::Identity(d, d);
  auto apply_a = [&](const ComplexMatrix& y_mat) {
    RealVector out(m);
    const ComplexMatrix adj = y_mat.adjoint();
    for (int i = 0; i < m; ++i) out(i) = trace_product(problem.a[static_cast<std::size_t>(i)], adj);
    return out;
  };
  auto combine_a = [&](const RealVector& coeff) {
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < m; ++i) out += coeff(i) * problem.a[static_cast<std::size_t>(i)];
    return out;
  };

  for (int it = 0;; ++it) {
    Eigen::LLT<ComplexMatrix> chol_s(sol.s);
    Eigen::LLT<ComplexMatrix> chol_x(sol.x);
    if (chol_s.info() != Eigen::Success || chol_x.info() != Eigen::Success ||
        (q > 0 && (sol.lp_s.minCoeff() <= 0.0 || sol.lp_x.minCoeff() <= 0.0))) {
      throw ValidationError("SDP: start point is not strictly feasible");
    }
    const double lp_gap = q > 0 ? sol.lp_x.dot(sol.lp_s) : 0.0;
    sol.gap = frobenius_inner(sol.x, sol.s) + lp_gap;
    RealVector lp_term = RealVector::Zero(m);
    if (q > 0) lp_term = problem.lp_a * sol.lp_x;
    const RealVector r_p = problem.b - apply_a(sol.x) - lp_term;
    sol.primal_residual = r_p.cwiseAbs().maxCoeff();
    sol.iterations = it;
    if (sol.gap < options.gap_tolerance) {
      sol.converged = true;
      break;
    }
    if (it >= options.max_iterations) break;

    const ComplexMatrix s_inv = hermitian_part(chol_s.solve(identity));
    const ComplexMatrix r_d = problem.c - combine_a(sol.y) - sol.s;
    RealVector r_lp;
    if (q > 0) r_lp = problem.lp_c - problem.lp_a.transpose() * sol.y - sol.lp_s;
    const double mu = sol.gap / (d + q);

    // Schur complement M_ij = Re tr(A_i X A_j S^-1) + sum_l L_il (x_l / s_l) L_jl.
    std::vector<ComplexMatrix> g_adj(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      g_adj[static_cast<std::size_t>(j)] =
          (sol.x * problem.a[static_cast<std::size_t>(j)] * s_inv).adjoint();
    }
    RealMatrix schur(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        const double v =
            trace_product(problem.a[static_cast<std::size_t>(i)], g_adj[static_cast<std::size_t>(j)]);
        schur(i, j) = v;
        schur(j, i) = v;
      }
    }
    RealVector lp_ratio;
    if (q > 0) {
      lp_ratio = sol.lp_x.cwiseQuotient(sol.lp_s);
      schur += problem.lp_a * lp_ratio.asDiagonal() * problem.lp_a.transpose();
    }
    const Eigen::PartialPivLU<RealMatrix> lu(schur);
    const RealVector base_rhs = r_p + apply_a(sol.x) + apply_a(sol.x * r_d * s_inv);

    auto direction = [&](double sigma, const ComplexMatrix* corr, const RealVector* lp_corr) {
      const ComplexMatrix target =
          (corr ? ComplexMatrix(sigma * mu * identity - *corr) : ComplexMatrix(sigma * mu * identity)) *
          s_inv;
      RealVector rhs = base_rhs - apply_a(target);
      RealVector lp_target;
      if (q > 0) {
        lp_target = RealVector::Constant(q, sigma * mu);
        if (lp_corr) lp_target -= *lp_corr;
        lp_target = lp_target.cwiseQuotient(sol.lp_s);
        const RealVector inner = sol.lp_x + sol.lp_x.cwiseProduct(r_lp).cwiseQuotient(sol.lp_s) - lp_target;
        rhs += problem.lp_a * inner;
      }
      Direction dir;
      dir.dy = lu.solve(rhs);
      if (!dir.dy.allFinite()) throw NumericalError("SDP: singular Newton system", sol.gap);
      dir.ds = r_d - combine_a(dir.dy);
      dir.dx = hermitian_part(target - sol.x - sol.x * dir.ds * s_inv);
      if (q > 0) {
        dir.lp_ds = r_lp - problem.lp_a.transpose() * dir.dy;
        dir.lp_dx = lp_target - sol.lp_x - sol.lp_x.cwiseProduct(dir.lp_ds).cwiseQuotient(sol.lp_s);
      }
      return dir;
    };
    auto step_lengths = [&](const Direction& dir, double fraction) {
      double ap = max_step(chol_x, dir.dx);
      double ad = max_step(chol_s, dir.ds);
      if (q > 0) {
        ap = std::min(ap, max_step(sol.lp_x, dir.lp_dx));
        ad = std::min(ad, max_step(sol.lp_s, dir.lp_ds));
      }
      return std::pair{std::min(1.0, fraction * ap), std::min(1.0, fraction * ad)};
    };

    const Direction predictor = direction(0.0, nullptr, nullptr);
    const auto [ap0, ad0] = step_lengths(predictor, 1.0);
    double predicted_gap =
        frobenius_inner(sol.x + ap0 * predictor.dx, sol.s + ad0 * predictor.ds);
    if (q > 0) {
      predicted_gap +=
          (sol.lp_x + ap0 * predictor.lp_dx).dot(sol.lp_s + ad0 * predictor.lp_ds);
    }
    const double sigma = std::pow(std::max(predicted_gap, 0.0) / sol.gap, 3.0);
    const ComplexMatrix corr = predictor.dx * predictor.ds;
    RealVector lp_corr;
    if (q > 0) lp_corr = predictor.lp_dx.cwiseProduct(predictor.lp_ds);
    const Direction dir = direction(sigma, &corr, q > 0 ? &lp_corr : nullptr);
    const auto [ap, ad] = step_lengths(dir, options.step_fraction);

    // Rounding can push a near-boundary iterate out of the cone; shorten the step.
    bool moved = false;
    for (double scale = 1.0; scale > 1e-6; scale *= 0.5) {
      const ComplexMatrix x_next = hermitian_part(sol.x + scale * ap * dir.dx);
      const ComplexMatrix s_next = hermitian_part(sol.s + scale * ad * dir.ds);
      if (Eigen::LLT<ComplexMatrix>(x_next).info() != Eigen::Success ||
          Eigen::LLT<ComplexMatrix>(s_next).info() != Eigen::Success) {
        continue;
      }
      RealVector lp_x_next, lp_s_next;
      if (q > 0) {
        lp_x_next = sol.lp_x + scale * ap * dir.lp_dx;
        lp_s_next = sol.lp_s + scale * ad * dir.lp_ds;
        if (lp_x_next.minCoeff() <= 0.0 || lp_s_next.minCoeff() <= 0.0) continue;
      }
      sol.x = x_next;
      sol.s = s_next;
      sol.y += scale * ad * dir.dy;
      if (q > 0) {
        sol.lp_x = lp_x_next;
        sol.lp_s = lp_s_next;
      }
      moved = true;
      break;
    }
    if (!moved) break;
  }
  sol.dual_objective = problem.b.dot(sol.y);
  sol.primal_objective = frobenius_inner(problem.c, sol.x) + (q > 0 ? problem.lp_c.dot(sol.lp_x) : 0.0);
  return sol;
}

}  // namespace rctomo
