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

#include <cmath>
#include <vector>

#include "rctomo/kernels.hpp"

namespace rctomo::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void rank1_update(double* m, const double* v, double scale, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = scale * v[i];
    double* row = m + i * n;
    for (std::size_t j = 0; j < n; ++j) row[j] += s * v[j];
  }
}

void hermitian_forms(const double* rho, const double* vectors, std::size_t dim,
                     std::size_t count, double* out) {
  std::vector<double> w(2 * dim);
  for (std::size_t c = 0; c < count; ++c) {
    const double* v = vectors + 2 * dim * c;
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      const double vr = v[2 * j];
      const double vi = v[2 * j + 1];
      const double* col = rho + 2 * dim * j;
      for (std::size_t i = 0; i < dim; ++i) {
        const double r = col[2 * i];
        const double q = col[2 * i + 1];
        w[2 * i] += r * vr - q * vi;
        w[2 * i + 1] += q * vr + r * vi;
      }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += v[2 * i] * w[2 * i] + v[2 * i + 1] * w[2 * i + 1];
    out[c] = acc;
  }
}

void wigner_series(const WignerTerms& terms, const double* t, const double* omega,
                   std::size_t count, double* out) {
  const int dim = terms.dim;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t p = 0; p < count; ++p) {
    const double y = t[p] * t[p] + omega[p] * omega[p];
    const double x = 2.0 * y;
    const double ar = t[p] * inv_sqrt2;
    const double ai = omega[p] * inv_sqrt2;
    double pr = 1.0;
    double pi = 0.0;
    double acc = 0.0;
    for (int k = 0; k < dim; ++k) {
      double l_prev = 0.0;
      double l_cur = 1.0;
      for (int n = 0; n + k < dim; ++n) {
        if (n > 0) {
          const double l_next =
              ((2.0 * (n - 1) + 1.0 + k - x) * l_cur - (n - 1 + k) * l_prev) / n;
          l_prev = l_cur;
          l_cur = l_next;
        }
        const std::size_t idx = static_cast<std::size_t>(k) * dim + n;
        const double term = terms.re[idx] * pr - terms.im[idx] * pi;
        acc += terms.weight[idx] * l_cur * term;
      }
      const double nr = pr * ar - pi * ai;
      const double ni = pr * ai + pi * ar;
      pr = nr;
      pi = ni;
    }
    out[p] = 2.0 * std::exp(-y) * acc;
  }
}

}  // namespace rctomo::kernels::scalar
