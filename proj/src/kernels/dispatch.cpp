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

#include <atomic>

#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"

namespace rctomo::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(RCTOMO_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() { return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar; }

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) {
  return isa == Isa::kScalar || (isa == Isa::kAvx2 && cpu_has_avx2());
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ValidationError(std::string("kernel ISA not available: ") + isa_name(isa));
  }
  active().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

#if defined(RCTOMO_HAVE_AVX2)
#define RCTOMO_DISPATCH(call) \
  (active_isa() == Isa::kAvx2 ? avx2::call : scalar::call)
#else
#define RCTOMO_DISPATCH(call) scalar::call
#endif

double dot(const double* a, const double* b, std::size_t n) {
  return RCTOMO_DISPATCH(dot(a, b, n));
}

void rank1_update(double* m, const double* v, double scale, std::size_t n) {
  RCTOMO_DISPATCH(rank1_update(m, v, scale, n));
}

void hermitian_forms(const double* rho, const double* vectors, std::size_t dim,
                     std::size_t count, double* out) {
  RCTOMO_DISPATCH(hermitian_forms(rho, vectors, dim, count, out));
}

void wigner_series(const WignerTerms& terms, const double* t, const double* omega,
                   std::size_t count, double* out) {
  RCTOMO_DISPATCH(wigner_series(terms, t, omega, count, out));
}

#undef RCTOMO_DISPATCH

#if !defined(RCTOMO_HAVE_AVX2)
namespace avx2 {
// Build without AVX2: keep the symbols so tests link, route to the reference.
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void rank1_update(double* m, const double* v, double scale, std::size_t n) {
  scalar::rank1_update(m, v, scale, n);
}
void hermitian_forms(const double* rho, const double* vectors, std::size_t dim,
                     std::size_t count, double* out) {
  scalar::hermitian_forms(rho, vectors, dim, count, out);
}
void wigner_series(const WignerTerms& terms, const double* t, const double* omega,
                   std::size_t count, double* out) {
  scalar::wigner_series(terms, t, omega, count, out);
}
}  // namespace avx2
#endif

}  // namespace rctomo::kernels
