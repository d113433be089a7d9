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

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "random_fixtures.hpp"
#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"
#include "rctomo/states.hpp"
#include "rctomo/wigner.hpp"

using namespace rctomo;

TEST_CASE("associated Laguerre recurrence matches the explicit sum") {
  for (int n = 0; n <= 12; ++n) {
    for (int k = 0; k <= 9; ++k) {
      for (double x : {0.0, 0.1, 1.0, 1.5, 2.5, 7.0, 18.0, 32.0}) {
        const double ref = oracle::laguerre_series(n, k, x);
        CHECK(associated_laguerre(n, k, x) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
      }
    }
  }
  CHECK(associated_laguerre(0, 3, 5.0) == 1.0);
  CHECK(associated_laguerre(1, 0, 2.0) == doctest::Approx(-1.0));
  CHECK(associated_laguerre(1, 2, 0.7) == doctest::Approx(2.3).epsilon(1e-14));
}

TEST_CASE("pure HG modes follow the closed form") {
  for (int n = 0; n < 6; ++n) {
    const DensityMatrix rho = hg_pure_state(n, 8);
    for (double t : {-3.0, -1.2, 0.0, 0.4, 2.2}) {
      for (double w : {-2.5, 0.0, 0.9, 3.1}) {
        CHECK(std::abs(wigner_value(rho, {t, w}) - oracle::pure_mode_wigner(n, t, w)) < 1e-12);
      }
    }
  }
}

TEST_CASE("coherences agree with direct quadrature of the wave function") {
  Rng rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    const DensityMatrix rho = fixture::random_state(4, 1, rng);
    // Recover amplitudes of the pure state from its first nonzero column.
    const EigenDecomposition e = eig_hermitian(rho.hermitian());
    const ComplexVector psi = e.vectors.col(3);
    std::vector<std::complex<double>> c(psi.data(), psi.data() + psi.size());
    for (auto [t, w] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {-1.5, 0.2}, {1.1, -1.4}, {0.0, 0.0}}) {
      CHECK(wigner_value(rho, {t, w}) == doctest::Approx(oracle::wigner_quadrature(c, t, w)).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("phase-point helpers") {
  const PhasePoint p{1.0, 1.0};
  CHECK(p.y() == doctest::Approx(2.0));
  CHECK(p.alpha_abs() == doctest::Approx(1.0));
  CHECK(p.theta() == doctest::Approx(M_PI / 4));
  for (const PhasePoint q : {PhasePoint{0.3, -1.7}, PhasePoint{-2.0, 0.5}}) {
    CHECK(2.0 * q.alpha_abs() * q.alpha_abs() == doctest::Approx(q.y()).epsilon(1e-14));
  }
}

TEST_CASE("grids: normalization, origin values and closed forms") {
  const AxisRange axis;  // [-4, 4], 101 points
  CHECK(axis.step() == doctest::Approx(0.08));
  for (int n = 0; n < 4; ++n) {
    const WignerGrid g = wigner_grid(hg_pure_state(n, 10), axis, axis);
    CHECK(std::abs(g.normalization - 1.0) < 1e-3);
    CHECK(g.values(50, 50) == doctest::Approx(n % 2 ? -2.0 : 2.0).epsilon(1e-12));
    double worst = 0.0;
    for (int i = 0; i < 101; ++i) {
      for (int j = 0; j < 101; ++j) {
        worst = std::max(worst, std::abs(g.values(i, j) - oracle::pure_mode_wigner(n, axis.at(i), axis.at(j))));
      }
    }
    CHECK(worst < 1e-8);
  }
  const WignerGrid mix = wigner_grid(mixture(hg_three_mode_mixture()), axis, axis);
  CHECK(std::abs(mix.normalization - 1.0) < 1e-3);

  // The vacuum mode is rotationally symmetric, so the grid is symmetric.
  const WignerGrid vac = wigner_grid(hg_pure_state(0, 10), axis, axis);
  CHECK((vac.values - vac.values.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("grid is linear in the state") {
  const AxisRange axis{-3.0, 3.0, 41};
  const WignerGrid mix = wigner_grid(mixture(hg_three_mode_mixture()), axis, axis);
  const WignerGrid w0 = wigner_grid(hg_pure_state(0, 10), axis, axis);
  const WignerGrid w1 = wigner_grid(hg_pure_state(1, 10), axis, axis);
  const WignerGrid w2 = wigner_grid(hg_pure_state(2, 10), axis, axis);
  const RealMatrix expected = 0.17 * w0.values + 0.70 * w1.values + 0.13 * w2.values;
  CHECK((mix.values - expected).cwiseAbs().maxCoeff() < 1e-10);

  const DensityMatrix half(HermitianMatrix(0.5 * (hg_pure_state(0, 10).matrix() + hg_pure_state(1, 10).matrix())));
  const WignerGrid h = wigner_grid(half, axis, axis);
  CHECK((h.values - 0.5 * (w0.values + w1.values)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("grid values do not depend on the kernel ISA") {
  const kernels::Isa saved = kernels::active_isa();
  Rng rng(32);
  const DensityMatrix rho = fixture::random_state(6, 3, rng);
  const AxisRange axis{-2.0, 2.0, 17};
  kernels::set_isa(kernels::Isa::kScalar);
  const WignerGrid a = wigner_grid(rho, axis, axis);
  if (kernels::isa_supported(kernels::Isa::kAvx2)) {
    kernels::set_isa(kernels::Isa::kAvx2);
    const WignerGrid b = wigner_grid(rho, axis, axis);
    CHECK(a.values == b.values);
  }
  kernels::set_isa(saved);
  for (int i = 0; i < 17; i += 4) {
    for (int j = 0; j < 17; j += 4) {
      CHECK(a.values(i, j) == doctest::Approx(wigner_value(rho, {axis.at(i), axis.at(j)})).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("frequency-bin matrices") {
  const RealMatrix u = export_u_matrix_real(mixture(bin_superposition_state(0)));
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      const bool on = (a % 3 == 0 && a <= 6) && (b % 3 == 0 && b <= 6);
      CHECK(std::abs(u(a, b) - (on ? 1.0 / 3.0 : 0.0)) < 1e-9);
    }
  }
  StateSpec single{BasisLabel::frequency_bins(10), {{basis_vector(2, 10), 1.0}}};
  const RealMatrix one = export_u_matrix_real(mixture(single));
  CHECK(one(2, 2) == 1.0);
  CHECK(one.cwiseAbs().sum() == 1.0);
  CHECK_THROWS_AS(export_u_matrix_real(hg_pure_state(0, 3)), ValidationError);
  CHECK_THROWS_AS(wigner_value(mixture(single), {0.0, 0.0}), ValidationError);
}
