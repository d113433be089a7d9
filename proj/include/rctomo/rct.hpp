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
#include <functional>
#include <optional>
#include <vector>

#include "rctomo/icc.hpp"
#include "rctomo/measurement.hpp"
#include "rctomo/mle.hpp"
#include "rctomo/states.hpp"

namespace rctomo {

struct RctConfig {
  StateSpec state;
  QpgConfig qpg;
  int max_bases = 0;  // 0: 2 d
  int runs = 10;
  std::uint64_t seed = 1;
  double relative_threshold = 1e-5;
  /// Number of independent witnesses; a step is IC only if every witness agrees.
  int z_draws = 1;
  /// Finite-click data is constrained to binomial bands of this many sigmas.
  double band_sigmas = 3.0;
  /// Measure each pure component on the shared bases and mix the records.
  bool mix_components = false;
  bool stop_at_ic = true;
  MlOptions ml;
  IccOptions icc;

  int effective_max_bases() const;
  void validate() const;
};

struct StepRecord {
  int k = 0;
  std::uint64_t basis_seed = 0;
  double s_cvx = 0.0;
  double fidelity = 0.0;
  double log_likelihood = 0.0;
  bool ml_converged = false;
  bool is_ic = false;
  /// Every accepted likelihood iterate was >= its predecessor.
  bool ml_monotone = true;
  int ml_iterations = 0;
  std::array<double, 2> duality_gaps{0.0, 0.0};
};

struct RctTrajectory {
  int run_id = 0;
  std::uint64_t run_seed = 0;
  DensityMatrix truth;
  std::vector<StepRecord> steps;
  std::optional<int> k_ic;
  /// Bases and records measured up to the last step.
  Dataset data;
};

/// Seed of run `run_id` under master seed `seed`.
std::uint64_t run_seed(std::uint64_t seed, int run_id);

/// Seed of run `run_id` of rank `rank` in a sweep under master seed `seed`.
/// The state, witness and bases of that run all derive from it.
std::uint64_t sweep_run_seed(std::uint64_t seed, int rank, int run_id);

/// One RCT loop on config.state. Bases, samples and the witness all derive from
/// run_seed(config.seed, run_id).
RctTrajectory run_rct(const RctConfig& config, int run_id);

/// Same loop on an explicit state and run seed.
RctTrajectory run_rct(const RctConfig& config, const StateSpec& state, std::uint64_t seed,
                      int run_id);

struct AggregateCurve {
  int rank = 0;
  std::vector<double> s_cvx_mean;
  std::vector<double> s_cvx_std;
  std::vector<double> fidelity_mean;
  std::vector<double> fidelity_std;
  int runs = 0;
  int ic_runs = 0;
  /// Mean K_IC over runs that reached IC.
  std::optional<double> mean_k_ic;
};

/// Pointwise mean and population standard deviation over runs; each trajectory
/// is extended at its final value up to the longest one. Throws ValidationError
/// on empty input.
AggregateCurve aggregate(const std::vector<RctTrajectory>& trajectories);

/// State generator for sweeps: (rank, rng) -> state.
using StateFactory = std::function<StateSpec(int rank, Rng& rng)>;
StateFactory family_factory(StateFamily family, int d);

struct SweepResult {
  int rank = 0;
  std::vector<RctTrajectory> trajectories;
  AggregateCurve curve;
};

/// config.runs trajectories per rank, each with a fresh state, witness and
/// bases, spread over `workers` threads. Results do not depend on `workers`.
/// Failures are rethrown with the rank, run and seed prepended.
std::vector<SweepResult> run_rank_sweep(const RctConfig& config, const std::vector<int>& ranks,
                                        const StateFactory& factory, int workers = 1);

/// config.runs trajectories on config.state; failures carry the run context.
std::vector<RctTrajectory> run_repeated(const RctConfig& config, int workers = 1);

/// Runs job(i) for i in [0, count) on up to `workers` threads; rethrows the
/// first failure by index.
void parallel_for(int count, int workers, const std::function<void(int)>& job);

}  // namespace rctomo
