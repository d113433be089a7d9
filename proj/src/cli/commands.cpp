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

#include "rctomo/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rctomo/cli/config.hpp"
#include "rctomo/cli/formats.hpp"
#include "rctomo/cli/manifest.hpp"
#include "rctomo/cli/state_flags.hpp"
#include "rctomo/errors.hpp"
#include "rctomo/kernels.hpp"
#include "rctomo/wigner.hpp"

namespace rctomo::cli {
namespace {

namespace fs = std::filesystem;

/// Flags shared by the subcommands; an Option* with count() > 0 overrides the
/// config value.
struct Flags {
  std::string config_path;
  std::string state;
  std::string family;
  std::uint64_t seed = 1;
  int runs = 10;
  std::vector<int> ranks;
  int dim = 10;
  long long clicks = 10000;
  bool noiseless = true;
  int kmax = 0;
  double threshold = 1e-5;
  std::string out;
  int workers = 0;
  int z_draws = 1;
  std::string replay;
  int points = 101;
  double extent = 4.0;
  std::string dataset;
  std::vector<std::string> inputs;
  std::string isa;

  std::vector<CLI::Option*> given;

  bool has(const std::string& name) const {
    return std::any_of(given.begin(), given.end(),
                       [&](const CLI::Option* o) { return o->check_name(name) && o->count() > 0; });
  }
};

void track(Flags& f, CLI::Option* opt) { f.given.push_back(opt); }

std::string isa_label() { return kernels::isa_name(kernels::active_isa()); }

void select_isa(const std::string& name) {
  if (name.empty()) return;
  for (kernels::Isa isa : {kernels::Isa::kScalar, kernels::Isa::kAvx2}) {
    if (name == kernels::isa_name(isa)) {
      kernels::set_isa(isa);
      return;
    }
  }
  throw ValidationError("unknown ISA '" + name + "' (scalar, avx2)");
}

ExperimentConfig configure(const Flags& f) {
  ExperimentConfig cfg = f.config_path.empty() ? parse_config("", "defaults") : load_config(f.config_path);
  if (f.has("--dim")) cfg.dim = f.dim;
  if (f.has("--state")) {
    cfg.state_text = f.state;
    cfg.explicit_state.reset();
  }
  if (f.has("--family")) {
    if (f.has("--state")) throw ValidationError("--family and --state are mutually exclusive");
    cfg.family = f.family == "bins" ? StateFamily::kFrequencyBins : StateFamily::kHgModes;
    cfg.state_text.reset();
    cfg.explicit_state.reset();
  }
  if (f.has("--rank")) {
    if (!cfg.is_sweep()) throw ValidationError("--rank applies to family sweeps, but a fixed state is configured");
    cfg.ranks = f.ranks;
  }
  if (f.has("--seed")) cfg.rct.seed = f.seed;
  if (f.has("--runs")) cfg.rct.runs = f.runs;
  if (f.has("--clicks")) cfg.rct.qpg.clicks_per_basis = f.clicks;
  if (f.has("--noiseless")) cfg.rct.qpg.noiseless = f.noiseless;
  if (f.has("--kmax")) cfg.rct.max_bases = f.kmax;
  if (f.has("--threshold")) cfg.rct.relative_threshold = f.threshold;
  if (f.has("--out")) cfg.output.directory = f.out;
  if (f.has("--workers")) cfg.workers = f.workers;
  if (f.has("--z-draws")) cfg.rct.z_draws = f.z_draws;
  cfg.validate();
  return cfg;
}

struct SimulationOutputs {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
  std::vector<AggregateCurve> curves;
  std::vector<RunSeed> seeds;
};

SimulationOutputs simulate(const ExperimentConfig& cfg) {
  SimulationOutputs o;
  const RctConfig engine = cfg.engine_config();
  const int workers = cfg.effective_workers();
  if (cfg.is_sweep()) {
    const std::vector<SweepResult> sweep =
        run_rank_sweep(engine, cfg.ranks, family_factory(cfg.family, cfg.dim), workers);
    for (const SweepResult& s : sweep) {
      if (cfg.output.trajectories) {
        o.files.emplace_back("trajectories_rank" + std::to_string(s.rank) + ".tsv",
                             format_trajectories(s.trajectories, s.rank));
      }
      o.curves.push_back(s.curve);
      for (const RctTrajectory& t : s.trajectories) {
        o.seeds.push_back({s.rank, t.run_id, t.run_seed});
        if (cfg.output.datasets) {
          o.files.emplace_back("datasets/rank" + std::to_string(s.rank) + "_run" + std::to_string(t.run_id) + ".txt",
                               format_dataset(t.data));
        }
      }
    }
  } else {
    const std::vector<RctTrajectory> runs = run_repeated(engine, workers);
    const int rank = numerical_rank(mixture(engine.state));
    if (cfg.output.trajectories) o.files.emplace_back("trajectories.tsv", format_trajectories(runs, rank));
    AggregateCurve curve = aggregate(runs);
    curve.rank = rank;
    o.curves.push_back(curve);
    for (const RctTrajectory& t : runs) {
      o.seeds.push_back({rank, t.run_id, t.run_seed});
      if (cfg.output.datasets) {
        o.files.emplace_back("datasets/run" + std::to_string(t.run_id) + ".txt", format_dataset(t.data));
      }
    }
  }
  if (cfg.output.aggregate) {
    o.files.emplace_back("aggregate.tsv", format_aggregate(o.curves));
    o.files.emplace_back("summary.tsv", format_summary(o.curves));
  }
  return o;
}

void print_summary(const std::vector<AggregateCurve>& curves, std::ostream& out) {
  for (const AggregateCurve& c : curves) {
    out << "rank " << c.rank << ": " << c.ic_runs << "/" << c.runs << " runs IC";
    if (c.mean_k_ic) out << ", mean K_IC " << std::setprecision(4) << *c.mean_k_ic;
    if (!c.fidelity_mean.empty()) out << ", final mean fidelity " << std::setprecision(6) << c.fidelity_mean.back();
    out << '\n';
  }
}

int cmd_simulate(const Flags& f, std::ostream& out) {
  if (!f.replay.empty()) {
    for (const char* name : {"--config", "--state", "--family", "--seed", "--runs", "--rank", "--dim", "--clicks",
                             "--noiseless", "--kmax", "--threshold", "--z-draws"}) {
      if (f.has(name)) throw ValidationError(std::string(name) + " cannot be combined with --replay");
    }
    const Manifest m = parse_manifest(read_file(f.replay));
    select_isa(m.isa);
    ExperimentConfig cfg = parse_config(m.config, f.replay + " (config)");
    if (f.has("--workers")) cfg.workers = f.workers;
    const std::string dir = f.has("--out") ? f.out : (fs::path(f.replay).parent_path() / "replay").string();
    const SimulationOutputs o = simulate(cfg);
    int mismatches = 0;
    for (const auto& [name, content] : o.files) {
      write_file_atomic((fs::path(dir) / name).string(), content);
      const auto it = std::find_if(m.outputs.begin(), m.outputs.end(),
                                   [&](const OutputDigest& d) { return d.file == name; });
      if (it == m.outputs.end() || it->fnv1a64 != hex64(fnv1a64(content))) {
        ++mismatches;
        out << "replay: " << name << " differs\n";
      }
    }
    if (o.files.size() != m.outputs.size()) ++mismatches;
    if (mismatches > 0) throw NumericalError("replay did not reproduce the recorded outputs", mismatches);
    out << "replay: " << o.files.size() << " outputs identical to " << f.replay << '\n';
    return kExitOk;
  }

  const ExperimentConfig cfg = configure(f);
  const SimulationOutputs o = simulate(cfg);
  Manifest m;
  m.isa = isa_label();
  m.config = emit_config(cfg);
  m.config_hash = hex64(fnv1a64(m.config));
  m.master_seed = cfg.rct.seed;
  m.runs = o.seeds;
  const fs::path dir(cfg.output.directory);
  for (const auto& [name, content] : o.files) {
    write_file_atomic((dir / name).string(), content);
    m.outputs.push_back({name, hex64(fnv1a64(content))});
  }
  write_file_atomic((dir / "manifest.json").string(), format_manifest(m));
  print_summary(o.curves, out);
  out << "wrote " << o.files.size() + 1 << " files to " << dir.string() << '\n';
  return kExitOk;
}

DensityMatrix state_for_plot(const Flags& f) {
  if (f.has("--state")) return mixture(parse_state(f.state, f.dim));
  if (!f.config_path.empty()) {
    ExperimentConfig cfg = load_config(f.config_path);
    if (f.has("--dim")) cfg.dim = f.dim;
    return mixture(cfg.resolved_state());
  }
  throw ValidationError("give the state with --state or --config");
}

std::string output_dir(const Flags& f) { return f.has("--out") ? f.out : OutputOptions{}.directory; }

int cmd_wigner(const Flags& f, std::ostream& out) {
  const DensityMatrix rho = state_for_plot(f);
  if (rho.label().kind != BasisKind::kHgMode) {
    throw ValidationError("the state is in the frequency-bin basis; use 'rctomo umatrix' instead");
  }
  if (f.points < 2) throw ValidationError("--points must be >= 2");
  if (!(f.extent > 0.0)) throw ValidationError("--extent must be positive");
  const AxisRange axis{-f.extent, f.extent, f.points};
  const WignerGrid g = wigner_grid(rho, axis, axis);
  const std::string path = (fs::path(output_dir(f)) / "wigner.tsv").string();
  write_file_atomic(path, format_grid({"t/omega", g.t_axis, g.omega_axis, g.values}));
  out << "normalization " << format_double(g.normalization) << '\n';
  out << "wrote " << path << '\n';
  return kExitOk;
}

int cmd_umatrix(const Flags& f, std::ostream& out) {
  const DensityMatrix rho = state_for_plot(f);
  if (rho.label().kind != BasisKind::kFrequencyBin) {
    throw ValidationError("the state is in the HG basis; use 'rctomo wigner' instead");
  }
  const RealMatrix u = export_u_matrix_real(rho);
  std::vector<double> axis;
  for (int i = 0; i < rho.dim(); ++i) axis.push_back(i);
  const std::string path = (fs::path(output_dir(f)) / "umatrix.tsv").string();
  write_file_atomic(path, format_grid({"bin", axis, axis, u}));
  out << "wrote " << path << '\n';
  return kExitOk;
}

int cmd_icc_check(const Flags& f, std::ostream& out) {
  const Dataset data = parse_dataset(read_file(f.dataset));
  if (f.z_draws < 1) throw ValidationError("--z-draws must be >= 1");
  if (!(f.threshold > 0.0)) throw ValidationError("--threshold must be positive");
  const bool noiseless = !f.has("--noiseless") || f.noiseless;
  const int d = data.dim();

  const MlResult ml = maximize_likelihood(data);
  IccProblem problem;
  problem.bases = data.bases;
  problem.p_hat = ml.p_hat;
  problem.center = ml.rho_ml;
  if (!noiseless) {
    problem.tolerance.resize(data.size());
    for (std::size_t k = 0; k < data.size(); ++k) {
      problem.tolerance[k] = binomial_bands({ml.p_hat[k]}, data.records[k].total()).front();
    }
  }
  IccOptions options;
  options.relative_threshold = f.threshold;

  out << std::setprecision(6);
  out << "dataset " << f.dataset << ": " << data.size() << " bases, dimension " << d << '\n';
  out << "constraints " << (noiseless ? "equality" : "3-sigma binomial bands") << '\n';
  out << "ml log_likelihood " << format_double(ml.log_likelihood) << ", iterations " << ml.iterations
      << (ml.converged ? ", converged" : ", NOT converged") << '\n';

  Rng witness_rng(derive_seed(f.seed, SeedStream::kWitness));
  bool all_ic = true;
  for (int w = 0; w < f.z_draws; ++w) {
    problem.z = random_full_rank_z(d, witness_rng);
    const IccCertificate c = solve_extrema(problem, options);
    all_ic = all_ic && c.is_ic;
    out << "witness " << w << ": s_cvx " << format_double(c.s_cvx) << ", threshold " << c.threshold
        << ", f_min " << c.f_min << ", f_max " << c.f_max << ", gaps " << c.duality_gaps[0] << ' '
        << c.duality_gaps[1] << ", max violation " << c.max_violation << ", free parameters "
        << c.free_parameters << (c.is_ic ? ", IC" : ", not IC") << '\n';
  }
  out << "verdict " << (all_ic ? "IC" : "not IC") << '\n';
  return kExitOk;
}

int cmd_aggregate(const Flags& f, std::ostream& out) {
  std::vector<AggregateCurve> curves;
  std::set<int> ranks;
  for (std::size_t i = 0; i < f.inputs.size(); ++i) {
    TrajectoryTable table;
    try {
      table = parse_trajectories(read_file(f.inputs[i]));
    } catch (const ValidationError& e) {
      throw ValidationError(f.inputs[i] + ": " + e.what());
    }
    if (table.rows.empty()) throw ValidationError(f.inputs[i] + ": no trajectory rows");
    AggregateCurve c = aggregate(trajectories_from_rows(table.rows));
    c.rank = table.rank.value_or(static_cast<int>(i) + 1);
    if (!ranks.insert(c.rank).second) throw ValidationError(f.inputs[i] + ": rank " + std::to_string(c.rank) + " appears twice");
    curves.push_back(c);
  }
  const fs::path dir(output_dir(f));
  write_file_atomic((dir / "aggregate.tsv").string(), format_aggregate(curves));
  write_file_atomic((dir / "summary.tsv").string(), format_summary(curves));
  print_summary(curves, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized compressive tomography of time-frequency states"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--isa", f.isa, "Pin the kernel ISA (scalar, avx2)");

  auto common_state = [&](CLI::App* sub) {
    track(f, sub->add_option("--config", f.config_path, "Experiment YAML file")->check(CLI::ExistingFile));
    track(f, sub->add_option("--state", f.state, "State, e.g. 'hg:0@0.17;hg:1@0.70;hg:2@0.13', 'sup:0,3,6:+-+', 'pair:0.73'"));
    track(f, sub->add_option("--dim", f.dim, "Hilbert-space dimension"));
    track(f, sub->add_option("--out", f.out, "Output directory"));
  };

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run RCT trajectories and write trajectory, aggregate and manifest files");
  common_state(simulate_cmd);
  track(f, simulate_cmd->add_option("--family", f.family, "State family of a rank sweep")->check(CLI::IsMember({"hg", "bins"})));
  track(f, simulate_cmd->add_option("--seed", f.seed, "Master seed"));
  track(f, simulate_cmd->add_option("--runs", f.runs, "Runs per rank"));
  track(f, simulate_cmd->add_option("--rank", f.ranks, "Rank(s) of the sweep"));
  track(f, simulate_cmd->add_option("--clicks", f.clicks, "Clicks per basis"));
  track(f, simulate_cmd->add_option("--noiseless", f.noiseless, "Exact probabilities instead of sampled counts"));
  track(f, simulate_cmd->add_option("--kmax", f.kmax, "Maximum number of bases (0: 2 d)"));
  track(f, simulate_cmd->add_option("--threshold", f.threshold, "IC threshold relative to the witness spectral width"));
  track(f, simulate_cmd->add_option("--workers", f.workers, "Worker threads (0: logical processors)"));
  track(f, simulate_cmd->add_option("--z-draws", f.z_draws, "Independent witnesses per run"));
  track(f, simulate_cmd->add_option("--replay", f.replay, "Rerun a manifest and compare outputs")->check(CLI::ExistingFile));

  CLI::App* wigner_cmd = app.add_subcommand("wigner", "Write the Wigner function of an HG-basis state on a grid");
  common_state(wigner_cmd);
  track(f, wigner_cmd->add_option("--points", f.points, "Grid points per axis"));
  track(f, wigner_cmd->add_option("--extent", f.extent, "Half-width of the square grid"));

  CLI::App* umatrix_cmd = app.add_subcommand("umatrix", "Write the real part of a frequency-bin density matrix");
  common_state(umatrix_cmd);

  CLI::App* icc_cmd = app.add_subcommand("icc-check", "Certify whether a measured dataset is informationally complete");
  icc_cmd->add_option("dataset", f.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  track(f, icc_cmd->add_option("--seed", f.seed, "Witness seed"));
  track(f, icc_cmd->add_option("--z-draws", f.z_draws, "Independent witnesses"));
  track(f, icc_cmd->add_option("--threshold", f.threshold, "IC threshold relative to the witness spectral width"));
  track(f, icc_cmd->add_option("--noiseless", f.noiseless, "Equality constraints (true) or binomial bands (false)"));

  CLI::App* aggregate_cmd = app.add_subcommand("aggregate", "Average trajectory files into aggregate and summary tables");
  aggregate_cmd->add_option("trajectories", f.inputs, "Trajectory files, one per rank")->required()->check(CLI::ExistingFile);
  track(f, aggregate_cmd->add_option("--out", f.out, "Output directory"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    select_isa(f.isa);
    if (*simulate_cmd) return cmd_simulate(f, out);
    if (*wigner_cmd) return cmd_wigner(f, out);
    if (*umatrix_cmd) return cmd_umatrix(f, out);
    if (*icc_cmd) return cmd_icc_check(f, out);
    if (*aggregate_cmd) return cmd_aggregate(f, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (diagnostic " << e.diagnostic() << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace rctomo::cli
