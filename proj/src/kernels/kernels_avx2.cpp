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

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "rctomo/kernels.hpp"

// Compiled with -mavx2 and without FMA contraction; every lane performs the
// same rounded operations, in the same order, as kernels_scalar.cpp.

namespace rctomo::kernels::avx2 {

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void rank1_update(double* m, const double* v, double scale, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = scale * v[i];
    const __m256d sv = _mm256_set1_pd(s);
    double* row = m + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d prod = _mm256_mul_pd(sv, _mm256_loadu_pd(v + j));
      _mm256_storeu_pd(row + j, _mm256_add_pd(_mm256_loadu_pd(row + j), prod));
    }
    for (; j < n; ++j) row[j] += s * v[j];
  }
}

void hermitian_forms(const double* rho, const double* vectors, std::size_t dim,
                     std::size_t count, double* out) {
  std::vector<double> w(2 * dim);
  const std::size_t pairs = dim / 2;
  for (std::size_t c = 0; c < count; ++c) {
    const double* v = vectors + 2 * dim * c;
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      const double vr = v[2 * j];
      const double vi = v[2 * j + 1];
      const __m256d vr4 = _mm256_set1_pd(vr);
      const __m256d vi4 = _mm256_setr_pd(-vi, vi, -vi, vi);
      const double* col = rho + 2 * dim * j;
      for (std::size_t p = 0; p < pairs; ++p) {
        const __m256d a = _mm256_loadu_pd(col + 4 * p);
        const __m256d swapped = _mm256_permute_pd(a, 0b0101);
        const __m256d prod = _mm256_add_pd(_mm256_mul_pd(a, vr4), _mm256_mul_pd(swapped, vi4));
        _mm256_storeu_pd(w.data() + 4 * p, _mm256_add_pd(_mm256_loadu_pd(w.data() + 4 * p), prod));
      }
      for (std::size_t i = 2 * pairs; i < dim; ++i) {
        const double r = col[2 * i];
        const double q = col[2 * i + 1];
        w[2 * i] += r * vr - q * vi;
        w[2 * i + 1] += q * vr + r * vi;
      }
    }
    out[c] = dot(v, w.data(), 2 * dim);
  }
}

void wigner_series(const WignerTerms& terms, const double* t, const double* omega,
                   std::size_t count, double* out) {
  const int dim = terms.dim;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const __m256d inv_sqrt2_4 = _mm256_set1_pd(inv_sqrt2);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t p = 0;
  for (; p + 4 <= count; p += 4) {
    const __m256d tv = _mm256_loadu_pd(t + p);
    const __m256d wv = _mm256_loadu_pd(omega + p);
    const __m256d y = _mm256_add_pd(_mm256_mul_pd(tv, tv), _mm256_mul_pd(wv, wv));
    const __m256d x = _mm256_mul_pd(two, y);
    const __m256d ar = _mm256_mul_pd(tv, inv_sqrt2_4);
    const __m256d ai = _mm256_mul_pd(wv, inv_sqrt2_4);
    __m256d pr = _mm256_set1_pd(1.0);
    __m256d pi = _mm256_setzero_pd();
    __m256d acc = _mm256_setzero_pd();
    for (int k = 0; k < dim; ++k) {
      __m256d l_prev = _mm256_setzero_pd();
      __m256d l_cur = _mm256_set1_pd(1.0);
      for (int n = 0; n + k < dim; ++n) {
        if (n > 0) {
          const __m256d c1 = _mm256_set1_pd(2.0 * (n - 1) + 1.0 + k);
          const __m256d c2 = _mm256_set1_pd(static_cast<double>(n - 1 + k));
          const __m256d num = _mm256_sub_pd(_mm256_mul_pd(_mm256_sub_pd(c1, x), l_cur),
                                            _mm256_mul_pd(c2, l_prev));
          const __m256d l_next = _mm256_div_pd(num, _mm256_set1_pd(static_cast<double>(n)));
          l_prev = l_cur;
          l_cur = l_next;
        }
        const std::size_t idx = static_cast<std::size_t>(k) * dim + n;
        const __m256d term = _mm256_sub_pd(_mm256_mul_pd(_mm256_set1_pd(terms.re[idx]), pr),
                                           _mm256_mul_pd(_mm256_set1_pd(terms.im[idx]), pi));
        acc = _mm256_add_pd(
            acc, _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(terms.weight[idx]), l_cur), term));
      }
      const __m256d nr = _mm256_sub_pd(_mm256_mul_pd(pr, ar), _mm256_mul_pd(pi, ai));
      const __m256d ni = _mm256_add_pd(_mm256_mul_pd(pr, ai), _mm256_mul_pd(pi, ar));
      pr = nr;
      pi = ni;
    }
    alignas(32) double ys[4];
    alignas(32) double sums[4];
    _mm256_store_pd(ys, y);
    _mm256_store_pd(sums, acc);
    for (int lane = 0; lane < 4; ++lane) out[p + lane] = 2.0 * std::exp(-ys[lane]) * sums[lane];
  }
  if (p < count) scalar::wigner_series(terms, t + p, omega + p, count - p, out + p);
}

}  // namespace rctomo::kernels::avx2
