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
#include <numeric>

#include "random_fixtures.hpp"
#include "rctomo/errors.hpp"
#include "rctomo/measurement.hpp"
#include "rctomo/states.hpp"

using namespace rctomo;

TEST_CASE("Haar bases are unitary and carry their seed") {
  for (int d : {1, 2, 5, 10}) {
    const MeasurementBasis b = haar_unitary(d, static_cast<std::uint64_t>(900 + d));
    CHECK(b.seed == 900u + static_cast<unsigned>(d));
    const ComplexMatrix gram = b.vectors.adjoint() * b.vectors;
    CHECK((gram - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK_NOTHROW(b.validate());
    const MeasurementBasis again = haar_unitary(d, static_cast<std::uint64_t>(900 + d));
    CHECK(again.vectors == b.vectors);
  }
  MeasurementBasis bad;
  bad.vectors = ComplexMatrix::Identity(3, 3) * 1.01;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(haar_unitary(0, std::uint64_t{1}), ValidationError);
}

TEST_CASE("Haar entries have the moments of the unitary group") {
  // E|U_ij|^2 = 1/d and E|U_ij|^4 = 2/(d(d+1)).
  const int d = 4;
  const int samples = 20000;
  Rng rng(41);
  double m2 = 0.0;
  double m4 = 0.0;
  Complex phase = 0.0;
  for (int s = 0; s < samples; ++s) {
    const MeasurementBasis b = haar_unitary(d, rng);
    const double a = std::norm(b.vectors(1, 2));
    m2 += a;
    m4 += a * a;
    phase += b.vectors(0, 0) / std::abs(b.vectors(0, 0));
  }
  m2 /= samples;
  m4 /= samples;
  // Standard errors: sqrt(var / samples) with var(|U|^2) = 1/20 - 1/16 + ... < 0.05.
  CHECK(std::abs(m2 - 1.0 / d) < 4 * std::sqrt(0.05 / samples));
  CHECK(std::abs(m4 - 2.0 / (d * (d + 1))) < 4 * std::sqrt(0.02 / samples));
  // Phases are uniform, so their mean vanishes.
  CHECK(std::abs(phase / double(samples)) < 4.0 / std::sqrt(double(samples)));
}

TEST_CASE("Born probabilities") {
  Rng rng(42);
  const DensityMatrix rho = fixture::random_state(6, 2, rng);
  const MeasurementBasis b = haar_unitary(6, rng);
  const std::vector<double> p = born_probabilities(rho, b);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (int l = 0; l < 6; ++l) {
    const double direct = (b.vectors.col(l).adjoint() * rho.matrix() * b.vectors.col(l))(0, 0).real();
    CHECK(p[static_cast<std::size_t>(l)] == doctest::Approx(direct).epsilon(1e-13).scale(1.0));
  }
  CHECK_THROWS_AS(born_probabilities(hg_pure_state(0, 3), b), ValidationError);
}

TEST_CASE("converted counts scale with eta") {
  const DensityMatrix rho = mixture(hg_three_mode_mixture());
  QpgConfig cfg;
  cfg.clicks_per_basis = 1000;
  CHECK(expected_converted_counts(rho, basis_vector(1, 10), cfg) == doctest::Approx(700.0));
  cfg.theta = M_PI / 6;
  CHECK(cfg.eta() == doctest::Approx(0.25));
  CHECK(expected_converted_counts(rho, basis_vector(0, 10), cfg) == doctest::Approx(42.5));
  CHECK_THROWS_AS(expected_converted_counts(rho, 2.0 * basis_vector(0, 10), cfg), ValidationError);
}

TEST_CASE("QPG configuration validation") {
  QpgConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.clicks_per_basis = -5;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("clicks_per_basis"), ValidationError);
  cfg = {};
  cfg.background_rate = 0.1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.theta = NAN;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("largest remainder rounding") {
  const std::vector<long long> c = largest_remainder_counts({0.5, 0.25, 0.25}, 2);
  CHECK(c == std::vector<long long>{1, 1, 0});  // tie between the quarters goes to the lower index
  CHECK(largest_remainder_counts({0.5, 0.25, 0.25}, 3) == std::vector<long long>{1, 1, 1});
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p = dirichlet_uniform(rng, 7);
    const long long total = 1 + static_cast<long long>(rng() % 100000);
    const std::vector<long long> r = largest_remainder_counts(p, total);
    CHECK(std::accumulate(r.begin(), r.end(), 0LL) == total);
    for (std::size_t l = 0; l < p.size(); ++l) CHECK(std::abs(double(r[l]) - p[l] * double(total)) < 1.0);
  }
}

TEST_CASE("multinomial draws stay within a few sigma") {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const long long n = 1000000;
  Rng rng(44);
  const std::vector<long long> c = multinomial(p, n, rng);
  CHECK(std::accumulate(c.begin(), c.end(), 0LL) == n);
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double sigma = std::sqrt(double(n) * p[l] * (1 - p[l]));
    CHECK(std::abs(double(c[l]) - double(n) * p[l]) < 4 * sigma);
  }
  const std::vector<long long> sure = multinomial({0.0, 1.0, 0.0}, 17, rng);
  CHECK(sure == std::vector<long long>{0, 17, 0});
}

TEST_CASE("noiseless records carry the exact probabilities") {
  Rng rng(45);
  const DensityMatrix rho = fixture::random_state(5, 3, rng);
  const MeasurementBasis b = haar_unitary(5, rng);
  QpgConfig cfg;
  cfg.noiseless = true;
  cfg.clicks_per_basis = 10000;
  const CountRecord r = simulate_basis_measurement(rho, b, 3, cfg, rng);
  CHECK(r.basis_index == 3);
  CHECK(r.frequencies == born_probabilities(rho, b));
  CHECK(r.total() == 10000);
  cfg.noiseless = false;
  const CountRecord noisy = simulate_basis_measurement(rho, b, 0, cfg, rng);
  CHECK(noisy.total() == 10000);
  for (std::size_t l = 0; l < 5; ++l) CHECK(noisy.frequencies[l] == double(noisy.counts[l]) / 1e4);
}

TEST_CASE("mixing records equals measuring the mixture") {
  const StateSpec spec = hg_three_mode_mixture();
  Rng rng(46);
  QpgConfig cfg;
  cfg.noiseless = true;
  std::vector<MeasurementBasis> bases;
  for (int k = 0; k < 5; ++k) bases.push_back(haar_unitary(10, rng));
  std::vector<std::vector<CountRecord>> sets;
  std::vector<double> weights;
  for (const StateComponent& c : spec.components) {
    const DensityMatrix pure(HermitianMatrix::projector(c.amplitudes));
    std::vector<CountRecord> set;
    for (int k = 0; k < 5; ++k) set.push_back(simulate_basis_measurement(pure, bases[k], k, cfg, rng));
    sets.push_back(set);
    weights.push_back(c.weight);
  }
  const std::vector<CountRecord> mixed = mix_count_records(sets, weights);
  const DensityMatrix rho = mixture(spec);
  for (int k = 0; k < 5; ++k) {
    const std::vector<double> p = born_probabilities(rho, bases[k]);
    for (std::size_t l = 0; l < 10; ++l) CHECK(std::abs(mixed[k].frequencies[l] - p[l]) < 1e-12);
    CHECK(mixed[k].total() == cfg.clicks_per_basis);
  }
  CHECK_THROWS_AS(mix_count_records(sets, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(mix_count_records(sets, {0.5, 0.6, -0.1}), ValidationError);
}

TEST_CASE("dataset validation") {
  Rng rng(47);
  Dataset data;
  CHECK_THROWS_AS(data.validate(), ValidationError);
  data.bases.push_back(haar_unitary(3, rng));
  CHECK_THROWS_AS(data.validate(), ValidationError);
  data.records.push_back(CountRecord::from_counts(0, {1, 2, 3}));
  CHECK_NOTHROW(data.validate());
  data.records[0] = CountRecord::from_counts(0, {0, 0, 0});
  CHECK_THROWS_AS(data.validate(), ValidationError);
  data.records[0] = CountRecord::from_counts(0, {1, 2});
  CHECK_THROWS_AS(data.validate(), ValidationError);
  data.records[0] = CountRecord::from_counts(0, {1, 2, 3});
  data.records[0].frequencies[0] += 0.1;
  CHECK_THROWS_AS(data.validate(), ValidationError);
  CHECK_THROWS_AS(CountRecord::from_counts(0, {1, -1}), ValidationError);
}

TEST_CASE("Haar reference values") {
  Rng rng(46);
  const MeasurementBasis one = haar_unitary(1, rng);
  CHECK(std::abs(one.vectors(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  // First moment at d = 4 over 1e5 samples, within three standard errors.
  const int samples = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double a = std::norm(haar_unitary(4, rng).vectors(0, 0));
    sum += a;
    sum2 += a * a;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
  CHECK(std::abs(mean - 0.25) < 3 * se);
  // Products of generated unitaries stay unitary.
  const ComplexMatrix u = haar_unitary(6, rng).vectors * haar_unitary(6, rng).vectors;
  CHECK((u.adjoint() * u - ComplexMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("a fixed state looks uniform under random bases") {
  Rng rng(47);
  const DensityMatrix rho = hg_pure_state(2, 5);
  const int samples = 4000;
  std::vector<double> mean(5, 0.0), sq(5, 0.0);
  for (int s = 0; s < samples; ++s) {
    const std::vector<double> p = born_probabilities(rho, haar_unitary(5, rng));
    for (std::size_t l = 0; l < 5; ++l) {
      mean[l] += p[l] / samples;
      sq[l] += p[l] * p[l] / samples;
    }
  }
  for (std::size_t l = 0; l < 5; ++l) {
    const double se = std::sqrt((sq[l] - mean[l] * mean[l]) / samples);
    CHECK(std::abs(mean[l] - 0.2) < 3 * se);
  }
}

TEST_CASE("reference probabilities and counts") {
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(10);
  Rng rng(48);
  for (double p : born_probabilities(mixed, haar_unitary(10, rng))) CHECK(p == doctest::Approx(0.1).epsilon(1e-12));

  MeasurementBasis identity;
  identity.vectors = ComplexMatrix::Identity(10, 10);
  const std::vector<double> hg = born_probabilities(mixture(hg_three_mode_mixture()), identity);
  const std::vector<double> expected{0.17, 0.70, 0.13, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t l = 0; l < 10; ++l) CHECK(hg[l] == doctest::Approx(expected[l]).epsilon(1e-12).scale(1.0));

  QpgConfig cfg;
  cfg.clicks_per_basis = 10000;
  const DensityMatrix pure = hg_pure_state(3, 10);
  CHECK(expected_converted_counts(pure, basis_vector(3, 10), cfg) == doctest::Approx(10000.0));
  CHECK(expected_converted_counts(pure, basis_vector(4, 10), cfg) == 0.0);
  cfg.theta = M_PI / 4;
  CHECK(expected_converted_counts(mixed, basis_vector(7, 10), cfg) == doctest::Approx(500.0));

  cfg = {};
  cfg.noiseless = true;
  cfg.clicks_per_basis = 1000;
  const CountRecord r = simulate_basis_measurement(mixed, haar_unitary(10, rng), 0, cfg, rng);
  CHECK(r.counts == std::vector<long long>(10, 100));
}

TEST_CASE("sampled frequencies at 1e5 clicks stay inside binomial bands") {
  Rng rng(49);
  QpgConfig cfg;
  cfg.clicks_per_basis = 100000;
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = fixture::random_state(6, 1 + trial, rng);
    const MeasurementBasis b = haar_unitary(6, rng);
    const std::vector<double> p = born_probabilities(rho, b);
    const CountRecord r = simulate_basis_measurement(rho, b, trial, cfg, rng);
    CHECK(r.total() == 100000);
    for (std::size_t l = 0; l < 6; ++l) {
      CHECK(std::abs(r.frequencies[l] - p[l]) <= 4 * std::sqrt(p[l] * (1 - p[l]) / 1e5) + 1e-12);
    }
  }
}
