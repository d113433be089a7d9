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

#include "rctomo/wigner.hpp"

#include <cmath>
#include <numbers>

#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"

namespace rctomo {
namespace {

void require_hg(const DensityMatrix& rho) {
  if (rho.label().kind != BasisKind::kHgMode) {
    throw ValidationError("Wigner functions are defined for HG-mode states only; use umatrix for "
                          "frequency-bin states");
  }
}

// Coefficients of the Laguerre series. Diagonal k = 0 carries rho_nn; k > 0
// carries both rho_{n,n+k} and its conjugate partner, hence the factor 2.
struct SeriesCoefficients {
  std::vector<double> weight;
  std::vector<double> re;
  std::vector<double> im;

  kernels::WignerTerms terms(int dim) const {
    return {dim, weight.data(), re.data(), im.data()};
  }
};

SeriesCoefficients series_coefficients(const DensityMatrix& rho) {
  const int d = rho.dim();
  const std::size_t size = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
  SeriesCoefficients c{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0),
                       std::vector<double>(size, 0.0)};
  for (int k = 0; k < d; ++k) {
    for (int n = 0; n + k < d; ++n) {
      const std::size_t idx = static_cast<std::size_t>(k) * d + n;
      // (-1)^n 2^k sqrt(n! / (n+k)!) in log form
      const double log_mag =
          k * std::log(2.0) + 0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + k + 1.0));
      double w = std::exp(log_mag) * (n % 2 == 0 ? 1.0 : -1.0);
      if (k > 0) w *= 2.0;
      c.weight[idx] = w;
      c.re[idx] = rho(n, n + k).real();
      c.im[idx] = rho(n, n + k).imag();
    }
  }
  return c;
}

}  // namespace

double PhasePoint::alpha_abs() const { return std::sqrt(0.5 * y()); }

double PhasePoint::theta() const { return std::atan2(omega, t); }

double associated_laguerre(int n, int k, double x) {
  if (n < 0 || k < 0) throw ValidationError("Laguerre indices must be nonnegative");
  double prev = 0.0;
  double cur = 1.0;
  for (int j = 0; j < n; ++j) {
    const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

double wigner_value(const DensityMatrix& rho, const PhasePoint& p) {
  require_hg(rho);
  const SeriesCoefficients c = series_coefficients(rho);
  double out = 0.0;
  kernels::wigner_series(c.terms(rho.dim()), &p.t, &p.omega, 1, &out);
  return out;
}

WignerGrid wigner_grid(const DensityMatrix& rho, const AxisRange& t_range,
                       const AxisRange& omega_range) {
  require_hg(rho);
  for (const AxisRange* r : {&t_range, &omega_range}) {
    if (r->points < 2 || !(r->hi > r->lo) || !std::isfinite(r->lo) || !std::isfinite(r->hi)) {
      throw ValidationError("grid axis needs hi > lo and at least 2 points");
    }
  }
  WignerGrid grid;
  for (int i = 0; i < t_range.points; ++i) grid.t_axis.push_back(t_range.at(i));
  for (int j = 0; j < omega_range.points; ++j) grid.omega_axis.push_back(omega_range.at(j));

  const SeriesCoefficients c = series_coefficients(rho);
  const std::size_t nt = grid.t_axis.size();
  const std::size_t nw = grid.omega_axis.size();
  std::vector<double> t_nodes(nt * nw);
  std::vector<double> w_nodes(nt * nw);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nw; ++j) {
      t_nodes[i * nw + j] = grid.t_axis[i];
      w_nodes[i * nw + j] = grid.omega_axis[j];
    }
  }
  std::vector<double> values(nt * nw);
  kernels::wigner_series(c.terms(rho.dim()), t_nodes.data(), w_nodes.data(), values.size(),
                         values.data());

  grid.values.resize(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nw));
  double sum = 0.0;
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nw; ++j) {
      const double v = values[i * nw + j];
      if (!std::isfinite(v)) throw NumericalError("non-finite Wigner value", v);
      grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      sum += v;
    }
  }
  grid.normalization = sum * t_range.step() * omega_range.step() / (2.0 * std::numbers::pi);
  return grid;
}

RealMatrix export_u_matrix_real(const DensityMatrix& rho) {
  if (rho.label().kind != BasisKind::kFrequencyBin) {
    throw ValidationError("u-matrix export is for frequency-bin states; use wigner for HG states");
  }
  const RealMatrix re = rho.matrix().real();
  return 0.5 * (re + re.transpose());
}

}  // namespace rctomo
