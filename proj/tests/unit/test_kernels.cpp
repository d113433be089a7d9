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
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"

using namespace rctomo;
namespace k = rctomo::kernels;

namespace {

std::vector<double> uniform(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

/// Restores the dispatcher choice when a test pins an ISA.
struct IsaGuard {
  k::Isa saved = k::active_isa();
  ~IsaGuard() { k::set_isa(saved); }
};

}  // namespace

TEST_CASE("scalar is always available and names are stable") {
  CHECK(k::isa_supported(k::Isa::kScalar));
  CHECK(std::string(k::isa_name(k::Isa::kScalar)) == "scalar");
  CHECK(std::string(k::isa_name(k::Isa::kAvx2)) == "avx2");
  IsaGuard guard;
  k::set_isa(k::Isa::kScalar);
  CHECK(k::active_isa() == k::Isa::kScalar);
  if (!k::isa_supported(k::Isa::kAvx2)) CHECK_THROWS_AS(k::set_isa(k::Isa::kAvx2), ValidationError);
}

TEST_CASE("dot: SIMD matches scalar up to summation order") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 100u, 1001u}) {
    const auto a = uniform(n, rng), b = uniform(n, rng);
    const double s = k::scalar::dot(a.data(), b.data(), n);
    const double v = k::avx2::dot(a.data(), b.data(), n);
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) bound += std::abs(a[i] * b[i]);
    CHECK(std::abs(s - v) <= 4e-16 * (bound + 1e-300) * std::max<double>(1.0, std::log2(static_cast<double>(n) + 1)));
  }
}

TEST_CASE("rank-one update is bit-identical across ISAs") {
  std::mt19937_64 rng(2);
  for (std::size_t n : {1u, 2u, 5u, 8u, 13u, 100u}) {
    const auto v = uniform(n, rng);
    auto m1 = uniform(n * n, rng);
    auto m2 = m1;
    k::scalar::rank1_update(m1.data(), v.data(), 0.37, n);
    k::avx2::rank1_update(m2.data(), v.data(), 0.37, n);
    CHECK(m1 == m2);
  }
}

TEST_CASE("hermitian forms: SIMD matches scalar and the direct formula") {
  std::mt19937_64 rng(3);
  for (std::size_t d : {1u, 2u, 3u, 4u, 9u, 10u}) {
    const std::size_t count = 7;
    // rho Hermitian: build from a random matrix.
    auto raw = uniform(2 * d * d, rng);
    std::vector<double> rho(2 * d * d);
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t r = 0; r < d; ++r) {
        const std::size_t ij = 2 * (c * d + r), ji = 2 * (r * d + c);
        rho[ij] = 0.5 * (raw[ij] + raw[ji]);
        rho[ij + 1] = 0.5 * (raw[ij + 1] - raw[ji + 1]);
      }
    }
    const auto vecs = uniform(2 * d * count, rng);
    std::vector<double> s(count), v(count);
    k::scalar::hermitian_forms(rho.data(), vecs.data(), d, count, s.data());
    k::avx2::hermitian_forms(rho.data(), vecs.data(), d, count, v.data());
    for (std::size_t c = 0; c < count; ++c) {
      std::complex<double> direct = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const std::complex<double> vi(vecs[2 * (c * d + i)], vecs[2 * (c * d + i) + 1]);
          const std::complex<double> vj(vecs[2 * (c * d + j)], vecs[2 * (c * d + j) + 1]);
          const std::complex<double> rij(rho[2 * (j * d + i)], rho[2 * (j * d + i) + 1]);
          direct += std::conj(vi) * rij * vj;
        }
      }
      CHECK(s[c] == doctest::Approx(direct.real()).epsilon(1e-12));
      CHECK(v[c] == doctest::Approx(s[c]).epsilon(1e-13));
    }
  }
}

TEST_CASE("Wigner series is bit-identical across ISAs") {
  std::mt19937_64 rng(4);
  for (int d : {1, 2, 4, 7, 10}) {
    const std::size_t terms = static_cast<std::size_t>(d * d);
    const auto w = uniform(terms, rng), re = uniform(terms, rng), im = uniform(terms, rng);
    const k::WignerTerms t{d, w.data(), re.data(), im.data()};
    for (std::size_t count : {1u, 3u, 4u, 5u, 101u}) {
      auto ts = uniform(count, rng), ws = uniform(count, rng);
      for (double& x : ts) x *= 4.0;
      for (double& x : ws) x *= 4.0;
      std::vector<double> a(count), b(count);
      k::scalar::wigner_series(t, ts.data(), ws.data(), count, a.data());
      k::avx2::wigner_series(t, ts.data(), ws.data(), count, b.data());
      CHECK(a == b);
    }
  }
}

TEST_CASE("dispatcher routes to the pinned ISA") {
  IsaGuard guard;
  std::mt19937_64 rng(5);
  const auto a = uniform(37, rng), b = uniform(37, rng);
  k::set_isa(k::Isa::kScalar);
  CHECK(k::dot(a.data(), b.data(), 37) == k::scalar::dot(a.data(), b.data(), 37));
  if (k::isa_supported(k::Isa::kAvx2)) {
    k::set_isa(k::Isa::kAvx2);
    CHECK(k::dot(a.data(), b.data(), 37) == k::avx2::dot(a.data(), b.data(), 37));
  }
}
