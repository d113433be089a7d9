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

#include "rctomo/rct.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "rctomo/errors.hpp"

namespace rctomo {

int RctConfig::effective_max_bases() const {
  return max_bases > 0 ? max_bases : 2 * state.dim();
}

void RctConfig::validate() const {
  state.validate();
  qpg.validate();
  if (max_bases < 0) throw ValidationError("rct.max_bases must be >= 1");
  if (runs < 1) throw ValidationError("rct.runs must be >= 1");
  if (z_draws < 1) throw ValidationError("rct.z_draws must be >= 1");
  if (!(relative_threshold > 0.0)) throw ValidationError("rct.threshold must be positive");
  if (!(band_sigmas >= 0.0)) throw ValidationError("rct.band_sigmas must be >= 0");
}

std::uint64_t run_seed(std::uint64_t seed, int run_id) {
  return derive_seed(seed, SeedStream::kRun, static_cast<std::uint64_t>(run_id));
}

std::uint64_t sweep_run_seed(std::uint64_t seed, int rank, int run_id) {
  return run_seed(derive_seed(seed, SeedStream::kState, static_cast<std::uint64_t>(rank)), run_id);
}

namespace {

/// Runs `body`, re-raising library errors with `context` prepended.
template <typename F>
void with_context(const std::string& context, F&& body) {
  try {
    body();
  } catch (const NumericalError& e) {
    throw NumericalError(context + ": " + e.what(), e.diagnostic());
  } catch (const ValidationError& e) {
    throw ValidationError(context + ": " + e.what());
  }
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

CountRecord measure(const RctConfig& config, const StateSpec& state, const DensityMatrix& truth,
                    const MeasurementBasis& basis, int index, std::uint64_t sample_seed) {
  if (!config.mix_components || state.components.size() == 1) {
    Rng rng(sample_seed);
    return simulate_basis_measurement(truth, basis, index, config.qpg, rng);
  }
  std::vector<std::vector<CountRecord>> sets;
  std::vector<double> weights;
  for (std::size_t i = 0; i < state.components.size(); ++i) {
    const StateComponent& c = state.components[i];
    const DensityMatrix pure(HermitianMatrix::projector(c.amplitudes), state.label);
    Rng rng(derive_seed(sample_seed, i));
    sets.push_back({simulate_basis_measurement(pure, basis, index, config.qpg, rng)});
    weights.push_back(c.weight);
  }
  return mix_count_records(sets, weights).front();
}

}  // namespace

RctTrajectory run_rct(const RctConfig& config, int run_id) {
  return run_rct(config, config.state, run_seed(config.seed, run_id), run_id);
}

RctTrajectory run_rct(const RctConfig& config, const StateSpec& state, std::uint64_t seed,
                      int run_id) {
  RctConfig effective = config;
  effective.state = state;
  effective.validate();
  const int d = state.dim();
  RctTrajectory traj;
  traj.run_id = run_id;
  traj.run_seed = seed;
  traj.truth = mixture(state);

  Rng witness_rng(derive_seed(seed, SeedStream::kWitness));
  std::vector<HermitianMatrix> witnesses;
  for (int i = 0; i < config.z_draws; ++i) witnesses.push_back(random_full_rank_z(d, witness_rng));

  Dataset data;
  std::optional<DensityMatrix> warm;
  const int k_max = effective.effective_max_bases();
  for (int k = 1; k <= k_max; ++k) {
    const std::uint64_t basis_seed = derive_seed(seed, SeedStream::kBasis, static_cast<std::uint64_t>(k));
    data.bases.push_back(haar_unitary(d, basis_seed));
    data.records.push_back(measure(config, state, traj.truth, data.bases.back(), k - 1,
                                   derive_seed(seed, SeedStream::kSample, static_cast<std::uint64_t>(k))));

    const MlResult ml = maximize_likelihood(data, config.ml, warm);
    warm = ml.rho_ml;

    IccProblem problem;
    problem.bases = data.bases;
    problem.p_hat = ml.p_hat;
    problem.center = ml.rho_ml;
    if (!config.qpg.noiseless && config.band_sigmas > 0.0) {
      problem.tolerance = binomial_bands(ml.p_hat, config.qpg.clicks_per_basis, config.band_sigmas);
    }
    StepRecord step;
    step.k = k;
    step.basis_seed = basis_seed;
    step.log_likelihood = ml.log_likelihood;
    step.ml_converged = ml.converged;
    step.ml_iterations = ml.iterations;
    step.ml_monotone = nondecreasing(ml.history);
    step.is_ic = true;
    IccOptions icc_options = config.icc;
    icc_options.relative_threshold = config.relative_threshold;
    for (std::size_t w = 0; w < witnesses.size(); ++w) {
      problem.z = witnesses[w];
      const IccCertificate cert = solve_extrema(problem, icc_options);
      if (w == 0) {
        step.s_cvx = cert.s_cvx;
        step.fidelity = fidelity(traj.truth, cert.rho_min);
        step.duality_gaps = cert.duality_gaps;
      }
      step.is_ic = step.is_ic && cert.is_ic;
    }
    traj.steps.push_back(step);
    if (step.is_ic && !traj.k_ic) {
      traj.k_ic = k;
      if (config.stop_at_ic) break;
    }
  }
  traj.data = std::move(data);
  return traj;
}

AggregateCurve aggregate(const std::vector<RctTrajectory>& trajectories) {
  if (trajectories.empty()) throw ValidationError("aggregate needs at least one trajectory");
  std::size_t length = 0;
  for (const RctTrajectory& t : trajectories) {
    if (t.steps.empty()) throw ValidationError("aggregate got an empty trajectory");
    length = std::max(length, t.steps.size());
  }
  AggregateCurve curve;
  curve.runs = static_cast<int>(trajectories.size());
  const double count = static_cast<double>(trajectories.size());
  for (std::size_t k = 0; k < length; ++k) {
    double s_sum = 0.0, f_sum = 0.0;
    for (const RctTrajectory& t : trajectories) {
      const StepRecord& r = t.steps[std::min(k, t.steps.size() - 1)];
      s_sum += r.s_cvx;
      f_sum += r.fidelity;
    }
    const double s_mean = s_sum / count;
    const double f_mean = f_sum / count;
    double s_var = 0.0, f_var = 0.0;
    for (const RctTrajectory& t : trajectories) {
      const StepRecord& r = t.steps[std::min(k, t.steps.size() - 1)];
      s_var += (r.s_cvx - s_mean) * (r.s_cvx - s_mean);
      f_var += (r.fidelity - f_mean) * (r.fidelity - f_mean);
    }
    curve.s_cvx_mean.push_back(s_mean);
    curve.s_cvx_std.push_back(std::sqrt(s_var / count));
    curve.fidelity_mean.push_back(f_mean);
    curve.fidelity_std.push_back(std::sqrt(f_var / count));
  }
  double k_sum = 0.0;
  for (const RctTrajectory& t : trajectories) {
    if (t.k_ic) {
      ++curve.ic_runs;
      k_sum += *t.k_ic;
    }
  }
  if (curve.ic_runs > 0) curve.mean_k_ic = k_sum / curve.ic_runs;
  return curve;
}

StateFactory family_factory(StateFamily family, int d) {
  return [family, d](int rank, Rng& rng) { return random_rank_state(family, rank, d, rng); };
}

void parallel_for(int count, int workers, const std::function<void(int)>& job) {
  const int threads = std::max(1, std::min(workers, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        job(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<SweepResult> run_rank_sweep(const RctConfig& config, const std::vector<int>& ranks,
                                        const StateFactory& factory, int workers) {
  if (ranks.empty()) throw ValidationError("rank sweep needs at least one rank");
  if (config.runs < 1) throw ValidationError("rct.runs must be >= 1");
  std::vector<SweepResult> out(ranks.size());
  const int per_rank = config.runs;
  const int total = per_rank * static_cast<int>(ranks.size());
  for (std::size_t r = 0; r < ranks.size(); ++r) {
    out[r].rank = ranks[r];
    out[r].trajectories.resize(static_cast<std::size_t>(per_rank));
  }
  parallel_for(total, workers, [&](int job) {
    const std::size_t r = static_cast<std::size_t>(job / per_rank);
    const int run = job % per_rank;
    const std::uint64_t seed = sweep_run_seed(config.seed, ranks[r], run);
    with_context("rank " + std::to_string(ranks[r]) + " run " + std::to_string(run) + " (seed " +
                     std::to_string(seed) + ")",
                 [&] {
                   Rng state_rng(derive_seed(seed, SeedStream::kState));
                   const StateSpec state = factory(ranks[r], state_rng);
                   out[r].trajectories[static_cast<std::size_t>(run)] = run_rct(config, state, seed, run);
                 });
  });
  for (SweepResult& s : out) {
    s.curve = aggregate(s.trajectories);
    s.curve.rank = s.rank;
  }
  return out;
}

std::vector<RctTrajectory> run_repeated(const RctConfig& config, int workers) {
  config.validate();
  std::vector<RctTrajectory> out(static_cast<std::size_t>(config.runs));
  parallel_for(config.runs, workers, [&](int run) {
    with_context("run " + std::to_string(run) + " (seed " + std::to_string(run_seed(config.seed, run)) + ")",
                 [&] { out[static_cast<std::size_t>(run)] = run_rct(config, run); });
  });
  return out;
}

}  // namespace rctomo
