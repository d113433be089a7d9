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

#include <cstdint>
#include <random>
#include <vector>

namespace rctomo {

/// The random engine used everywhere. Each run owns its own instance.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for stream `index` of `parent`. Distinct (parent, index) pairs give
/// statistically independent seeds.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Stream labels used with derive_seed.
enum class SeedStream : std::uint64_t {
  kRun = 1,
  kState = 2,
  kWitness = 3,
  kBasis = 4,
  kSample = 5,
};

std::uint64_t derive_seed(std::uint64_t parent, SeedStream stream, std::uint64_t index = 0);

/// Standard normal draw.
double normal(Rng& rng);

/// Dirichlet(1, ..., 1) sample of length n.
std::vector<double> dirichlet_uniform(Rng& rng, int n);

}  // namespace rctomo
