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

// Data-parallel inner loops with a scalar reference implementation and an AVX2
// variant. The dispatcher picks the widest ISA the CPU supports; callers may
// pin an ISA for testing. The AVX2 paths use the same operation order as the
// scalar ones, so wigner_series and rank1_update are bit-identical across ISAs
// and dot/hermitian_forms differ only by summation order.

#include <cstddef>

namespace rctomo::kernels {

enum class Isa { kScalar, kAvx2 };

bool isa_supported(Isa isa);
Isa active_isa();
/// Throws ValidationError if the ISA is not supported by this CPU or build.
void set_isa(Isa isa);
const char* isa_name(Isa isa);

/// Coefficients of a Wigner double sum in the form
///   W(t, w) = 2 e^{-y} sum_{k,n} weight[k*dim+n] * L_n^{(k)}(2y)
///                    * Re((re + i im)[k*dim+n] * alpha^k),
/// alpha = (t + i w) / sqrt 2, y = t^2 + w^2. Entries with n + k >= dim are
/// ignored.
struct WignerTerms {
  int dim = 0;
  const double* weight = nullptr;
  const double* re = nullptr;
  const double* im = nullptr;
};

double dot(const double* a, const double* b, std::size_t n);

/// m[i*n + j] += scale * v[i] * v[j] for i, j < n (full square, row-major).
void rank1_update(double* m, const double* v, double scale, std::size_t n);

/// out[c] = v_c^dagger rho v_c for `count` column vectors of length dim.
/// rho and vectors are column-major interleaved complex (re, im) arrays.
void hermitian_forms(const double* rho, const double* vectors, std::size_t dim,
                     std::size_t count, double* out);

/// out[i] = W(t[i], omega[i]).
void wigner_series(const WignerTerms& terms, const double* t, const double* omega,
                   std::size_t count, double* out);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void rank1_update(double* m, const double* v, double scale, std::size_t n);
void hermitian_forms(const double* rho, const double* vectors, std::size_t dim,
                     std::size_t count, double* out);
void wigner_series(const WignerTerms& terms, const double* t, const double* omega,
                   std::size_t count, double* out);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void rank1_update(double* m, const double* v, double scale, std::size_t n);
void hermitian_forms(const double* rho, const double* vectors, std::size_t dim,
                     std::size_t count, double* out);
void wigner_series(const WignerTerms& terms, const double* t, const double* omega,
                   std::size_t count, double* out);
}  // namespace avx2

}  // namespace rctomo::kernels
