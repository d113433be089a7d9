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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rctomo/cli/commands.hpp"
#include "rctomo/cli/config.hpp"
#include "rctomo/cli/formats.hpp"
#include "rctomo/cli/manifest.hpp"
#include "rctomo/cli/state_flags.hpp"
#include "rctomo/errors.hpp"
#include "rctomo/wigner.hpp"

using namespace rctomo;
using namespace rctomo::cli;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rctomo");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Fresh directory below the working directory, removed on destruction.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::current_path() / ("cli_scratch_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

const char* kSweepYaml = R"(state:
  dim: 4
  family: hg
  ranks: [1, 2]
qpg:
  clicks_per_basis: 5000
  noiseless: false
rct:
  runs: 2
  seed: 11
)";

}  // namespace

TEST_CASE("state grammar") {
  const StateSpec three = parse_state("hg:0@0.17;hg:1@0.70;hg:2@0.13", 10);
  CHECK(three.label.kind == BasisKind::kHgMode);
  CHECK((mixture(three).matrix() - mixture(hg_three_mode_mixture()).matrix()).norm() < 1e-15);
  const StateSpec equal = parse_state("hg:0;hg:3", 5);
  CHECK(equal.components.size() == 2);
  CHECK(equal.components[1].weight == 0.5);
  CHECK(equal.components[1].amplitudes == basis_vector(3, 5));
  const StateSpec sup = parse_state("sup:0,3,6:+-+", 10);
  CHECK(sup.label.kind == BasisKind::kFrequencyBin);
  CHECK((sup.components[0].amplitudes - bin_superposition_vector({0, 3, 6}, {1, -1, 1}, 10)).norm() < 1e-15);
  const RealVector ev = eigenvalues(mixture(parse_state("pair:0.73", 10)).hermitian());
  CHECK(ev(9) == doctest::Approx(0.73).epsilon(1e-12));
  CHECK(ev(8) == doctest::Approx(0.27).epsilon(1e-12));
  CHECK(parse_state("bin:4", 10).components[0].amplitudes == basis_vector(4, 10));

  for (const char* bad : {"", "hg", "hg:x", "hg:10", "hg:-1", "hg:0;bin:1", "hg:0@0.5;hg:1", "hg:0@0.5;hg:1@0.6",
                          "pair:0.73;hg:0", "pair:0.5", "sup:0,3:+", "sup:0,3:+*", "wave:1", "hg:0@-1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_state(bad, 10), ValidationError);
  }
  CHECK_THROWS_WITH_AS(parse_state("hg:0;wave:2", 10), doctest::Contains("wave:2"), ValidationError);
}

TEST_CASE("experiment files") {
  const ExperimentConfig c = parse_config(kSweepYaml);
  CHECK(c.is_sweep());
  CHECK(c.dim == 4);
  CHECK(c.ranks == std::vector<int>{1, 2});
  CHECK(c.rct.qpg.clicks_per_basis == 5000);
  CHECK(c.rct.runs == 2);
  CHECK(c.rct.seed == 11);
  CHECK(c.output.directory == "rctomo-out");
  CHECK_THROWS_AS(c.resolved_state(), ValidationError);

  const ExperimentConfig fixed = parse_config("state:\n  dim: 10\n  spec: \"pair:0.73\"\n");
  CHECK_FALSE(fixed.is_sweep());
  CHECK(fixed.resolved_state().label.kind == BasisKind::kFrequencyBin);

  const ExperimentConfig explicit_state = parse_config(
      "state:\n  dim: 2\n  components:\n    - weight: 1\n      amplitudes: [[0.6, 0], [0, 0.8]]\n");
  CHECK(explicit_state.resolved_state().components[0].amplitudes(1) == Complex(0.0, 0.8));
}

TEST_CASE("experiment file errors cite the key and position") {
  const std::string negative = "state:\n  dim: 4\nqpg:\n  clicks_per_basis: -10\n";
  CHECK_THROWS_WITH_AS(parse_config(negative, "exp.yaml"), doctest::Contains("exp.yaml:4:"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(negative), doctest::Contains("qpg.clicks_per_basis"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config("rct:\n  runz: 3\n"), doctest::Contains("runz"), ValidationError);
  CHECK_THROWS_AS(parse_config("state:\n  dim: four\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("state: [1, 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("state:\n  dim: 4\n  family: photons\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("state:\n  dim: 4\n  family: bins\n  ranks: [4]\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("rct:\n  ml_algorithm: gradient\n"), ValidationError);
  CHECK_THROWS_AS(load_config("does/not/exist.yaml"), ValidationError);
}

TEST_CASE("emitted configs parse back to themselves") {
  for (const std::string& text : {std::string(kSweepYaml), std::string("state:\n  dim: 10\n  spec: \"sup:0,3,6:+-+\"\nrct:\n  threshold: 3e-6\n"),
                                 std::string("state:\n  dim: 2\n  components:\n    - weight: 0.25\n      amplitudes: [[1, 0], [0, 0]]\n    - weight: 0.75\n      amplitudes: [[0, 0], [0.6, 0.8]]\n")}) {
    const std::string once = emit_config(parse_config(text));
    CHECK(emit_config(parse_config(once)) == once);
  }
}

TEST_CASE("numbers survive a text round trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 1e-17}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("trajectory and aggregate tables") {
  RctConfig config;
  config.state = parse_state("hg:0;hg:1", 3);
  config.qpg.clicks_per_basis = 2000;
  config.runs = 2;
  const std::vector<RctTrajectory> runs = run_repeated(config);
  const std::string text = format_trajectories(runs, 2);
  CHECK(text.rfind("# rank: 2\nrun_id\tk\tbasis_seed\t", 0) == 0);
  const TrajectoryTable table = parse_trajectories(text);
  CHECK(table.rank == 2);
  std::size_t total = 0;
  for (const RctTrajectory& t : runs) total += t.steps.size();
  REQUIRE(table.rows.size() == total);
  CHECK(table.rows[0].basis_seed == runs[0].steps[0].basis_seed);
  CHECK(table.rows[0].s_cvx == runs[0].steps[0].s_cvx);
  CHECK(table.rows[0].log_likelihood == runs[0].steps[0].log_likelihood);

  const std::vector<RctTrajectory> rebuilt = trajectories_from_rows(table.rows);
  REQUIRE(rebuilt.size() == runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) CHECK(rebuilt[i].k_ic == runs[i].k_ic);
  AggregateCurve curve = aggregate(runs);
  curve.rank = 2;
  AggregateCurve again = aggregate(rebuilt);
  again.rank = 2;
  CHECK(format_aggregate({curve}) == format_aggregate({again}));

  AggregateCurve none = curve;
  none.rank = 3;
  none.ic_runs = 0;
  none.mean_k_ic.reset();
  const std::string summary = format_summary({curve, none});
  CHECK(summary.find("\tNA\n") != std::string::npos);
  const std::vector<AggregateCurve> parsed = parse_aggregate(format_aggregate({curve, none}), summary);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].s_cvx_mean == curve.s_cvx_mean);
  CHECK(parsed[0].fidelity_std == curve.fidelity_std);
  CHECK(parsed[0].mean_k_ic == curve.mean_k_ic);
  CHECK_FALSE(parsed[1].mean_k_ic.has_value());

  CHECK_THROWS_AS(parse_trajectories("run_id\tk\n1\t2\n"), ValidationError);
  CHECK_THROWS_AS(parse_trajectories(text + "0\tx\n"), ValidationError);
}

TEST_CASE("grid tables") {
  GridTable g;
  g.corner = "t/omega";
  g.row_axis = {-1.0, 0.0, 1.0 / 3.0};
  g.col_axis = {0.5, 0.75};
  g.values.resize(3, 2);
  g.values << 1.0 / 7, -2.0, 3e-20, 4.0, 5.5, -1.0 / 9;
  const GridTable back = parse_grid(format_grid(g));
  CHECK(back.corner == g.corner);
  CHECK(back.row_axis == g.row_axis);
  CHECK(back.col_axis == g.col_axis);
  CHECK(back.values == g.values);
  CHECK_THROWS_AS(parse_grid("x\t1\t2\n0\t1\n"), ValidationError);
  CHECK_THROWS_AS(parse_grid("x\t2\t1\n0\t1\t1\n"), ValidationError);
}

TEST_CASE("dataset files") {
  Rng rng(81);
  Dataset data;
  QpgConfig noiseless;
  noiseless.noiseless = true;
  QpgConfig sampled;
  const DensityMatrix rho = mixture(parse_state("hg:0;hg:2", 3));
  for (int k = 0; k < 3; ++k) {
    data.bases.push_back(haar_unitary(3, rng));
    data.records.push_back(simulate_basis_measurement(rho, data.bases.back(), k, k ? sampled : noiseless, rng));
  }
  const std::string text = format_dataset(data);
  const Dataset back = parse_dataset(text);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back.bases[k].vectors == data.bases[k].vectors);
    CHECK(back.records[k].counts == data.records[k].counts);
    CHECK(back.records[k].frequencies == data.records[k].frequencies);
  }
  CHECK(format_dataset(back) == text);

  const std::string hand = "# computational basis of a qubit\n1 0 0 0\n0 0 1 0\n30 70\n";
  const Dataset tiny = parse_dataset(hand);
  CHECK(tiny.records[0].frequencies == std::vector<double>{0.3, 0.7});
  CHECK_THROWS_WITH_AS(parse_dataset("1 0 0 0\n0 0 1 0\n30\n"), doctest::Contains("line 3"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_dataset("1 0 0 0\n1 0 0 0\n3 7\n"), doctest::Contains("line"), ValidationError);
  CHECK_THROWS_AS(parse_dataset("# nothing\n"), ValidationError);
  CHECK_THROWS_AS(parse_dataset("1 0 0 0\n0 0 1 0\n3 -7\n"), ValidationError);
}

TEST_CASE("manifests") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  Manifest m;
  m.isa = "scalar";
  m.config = emit_config(parse_config(kSweepYaml));
  m.config_hash = hex64(fnv1a64(m.config));
  m.master_seed = 11;
  m.runs = {{1, 0, 123}, {2, 1, 18446744073709551615ull}};
  m.outputs = {{"aggregate.tsv", "0123456789abcdef"}};
  const Manifest back = parse_manifest(format_manifest(m));
  CHECK(back.config == m.config);
  CHECK(back.isa == "scalar");
  CHECK(back.master_seed == 11);
  REQUIRE(back.runs.size() == 2);
  CHECK(back.runs[1].seed == 18446744073709551615ull);
  CHECK(back.outputs[0].fnv1a64 == "0123456789abcdef");
  Manifest tampered = m;
  tampered.config += "# edited\n";
  CHECK_THROWS_AS(parse_manifest(format_manifest(tampered)), ValidationError);
  CHECK_THROWS_AS(parse_manifest("{\"tool\": \"rctomo\"}"), ValidationError);
  CHECK_THROWS_AS(parse_manifest("not json"), ValidationError);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"--help"}).code == kExitOk);
  CHECK(invoke({}).code == kExitValidation);
  CHECK(invoke({"simulate", "--runs", "many"}).code == kExitValidation);
  CHECK(invoke({"simulate", "--bogus"}).code == kExitValidation);
  CHECK(invoke({"wigner", "--state", "hg:0", "--isa", "vliw"}).code == kExitValidation);
  Scratch s("codes");
  const Invocation clicks = invoke({"simulate", "--state", "hg:0", "--dim", "3", "--clicks", "-5", "--out", s / "x"});
  CHECK(clicks.code == kExitValidation);
  CHECK(clicks.err.find("clicks_per_basis") != std::string::npos);
  const Invocation bins = invoke({"wigner", "--state", "bin:1", "--out", s / "w"});
  CHECK(bins.code == kExitValidation);
  CHECK(bins.err.find("umatrix") != std::string::npos);
  CHECK(invoke({"umatrix", "--state", "hg:1", "--out", s / "u"}).code == kExitValidation);
  {
    std::ofstream(s / "yaml.yaml") << "qpg:\n  clicks_per_basis: -10\n";
    const Invocation bad = invoke({"simulate", "--config", s / "yaml.yaml"});
    CHECK(bad.code == kExitValidation);
    CHECK(bad.err.find("yaml.yaml:2:") != std::string::npos);
    CHECK(bad.err.find("qpg.clicks_per_basis") != std::string::npos);
  }
}

TEST_CASE("Wigner and u-matrix commands") {
  Scratch s("grids");
  Invocation r = invoke({"wigner", "--state", "hg:0", "--dim", "4", "--out", s.dir.string()});
  REQUIRE(r.code == kExitOk);
  GridTable g = parse_grid(read_file(s / "wigner.tsv"));
  CHECK(g.corner == "t/omega");
  CHECK(g.row_axis.size() == 101);
  CHECK(g.values.minCoeff() >= -1e-9);
  CHECK(g.values.maxCoeff() == doctest::Approx(2.0));
  CHECK(r.out.find("normalization") != std::string::npos);

  r = invoke({"wigner", "--state", "hg:1", "--dim", "4", "--points", "21", "--extent", "2", "--out", s.dir.string()});
  REQUIRE(r.code == kExitOk);
  g = parse_grid(read_file(s / "wigner.tsv"));
  CHECK(g.values.rows() == 21);
  CHECK(g.values(10, 10) == doctest::Approx(-2.0));
  CHECK(g.row_axis.back() == 2.0);

  r = invoke({"umatrix", "--state", "pair:0.73", "--out", s.dir.string()});
  REQUIRE(r.code == kExitOk);
  const GridTable u = parse_grid(read_file(s / "umatrix.tsv"));
  CHECK(u.corner == "bin");
  const RealVector ev = eigenvalues(HermitianMatrix(u.values.cast<Complex>()));
  CHECK(ev(9) == doctest::Approx(0.73).epsilon(1e-12));
  CHECK(ev(8) == doctest::Approx(0.27).epsilon(1e-12));
}

TEST_CASE("icc-check reports on datasets") {
  Scratch s("icc");
  const Invocation sim = invoke({"simulate", "--state", "hg:0@0.17;hg:1@0.70;hg:2@0.13", "--runs", "1",
                                 "--noiseless", "true", "--kmax", "11", "--out", s.dir.string()});
  REQUIRE(sim.code == kExitOk);
  // A dataset from a separate full simulation: write all 11 bases.
  RctConfig config;
  config.state = hg_three_mode_mixture();
  config.qpg.noiseless = true;
  config.max_bases = 11;
  config.stop_at_ic = false;
  const RctTrajectory t = run_rct(config, 0);
  write_file_atomic(s / "full.txt", format_dataset(t.data));
  Invocation r = invoke({"icc-check", s / "full.txt"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("verdict IC\n") != std::string::npos);

  Dataset one = t.data;
  one.bases.resize(1);
  one.records.resize(1);
  write_file_atomic(s / "one.txt", format_dataset(one));
  r = invoke({"icc-check", s / "one.txt"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("verdict not IC\n") != std::string::npos);

  write_file_atomic(s / "empty.txt", "# no bases\n");
  r = invoke({"icc-check", s / "empty.txt"});
  CHECK(r.code == kExitValidation);
  CHECK(invoke({"icc-check", s / "missing.txt"}).code == kExitValidation);
}

TEST_CASE("reports do not depend on who wrote the dataset") {
  // The same numbers typed by hand and produced by the simulator.
  Scratch s("producer");
  const std::string hand =
      "# qubit, Z then X\n"
      "1 0 0 0\n0 0 1 0\n6000 4000\n"
      "0.70710678118654757 0 0.70710678118654757 0\n0.70710678118654757 0 -0.70710678118654757 0\n5500 4500\n";
  write_file_atomic(s / "hand.txt", hand);
  Dataset data;
  MeasurementBasis z, x;
  z.vectors = ComplexMatrix::Identity(2, 2);
  const double h = 0.70710678118654757;
  x.vectors.resize(2, 2);
  x.vectors << h, h, h, -h;
  data.bases = {z, x};
  data.records = {CountRecord::from_counts(0, {6000, 4000}), CountRecord::from_counts(1, {5500, 4500})};
  write_file_atomic(s / "made.txt", format_dataset(data));
  const Invocation a = invoke({"icc-check", s / "hand.txt", "--seed", "3"});
  const Invocation b = invoke({"icc-check", s / "made.txt", "--seed", "3"});
  REQUIRE(a.code == kExitOk);
  auto body = [](const std::string& report) { return report.substr(report.find('\n') + 1); };
  CHECK(body(a.out) == body(b.out));
}

TEST_CASE("simulation outputs are reproducible") {
  Scratch s("repro");
  std::ofstream(s / "sweep.yaml") << kSweepYaml;
  const Invocation one = invoke({"simulate", "--config", s / "sweep.yaml", "--workers", "1", "--out", s / "a"});
  REQUIRE(one.code == kExitOk);
  CHECK(one.out.find("rank 1:") != std::string::npos);
  CHECK(one.out.find("rank 2:") != std::string::npos);
  const Invocation two = invoke({"simulate", "--config", s / "sweep.yaml", "--workers", "2", "--out", s / "b"});
  REQUIRE(two.code == kExitOk);
  for (const char* name : {"trajectories_rank1.tsv", "trajectories_rank2.tsv", "aggregate.tsv", "summary.tsv"}) {
    CAPTURE(name);
    CHECK(read_file(s / (std::string("a/") + name)) == read_file(s / (std::string("b/") + name)));
  }

  const Manifest m = parse_manifest(read_file(s / "a/manifest.json"));
  CHECK(m.master_seed == 11);
  CHECK(m.runs.size() == 4);
  CHECK(m.runs[3].seed == sweep_run_seed(11, 2, 1));
  CHECK(m.outputs.size() == 4);

  const Invocation replay = invoke({"simulate", "--replay", s / "a/manifest.json"});
  CHECK(replay.code == kExitOk);
  CHECK(fs::exists(s / "a/replay/aggregate.tsv"));

  const Invocation agg = invoke({"aggregate", s / "a/trajectories_rank1.tsv", s / "a/trajectories_rank2.tsv",
                                 "--out", s / "c"});
  REQUIRE(agg.code == kExitOk);
  CHECK(read_file(s / "c/aggregate.tsv") == read_file(s / "a/aggregate.tsv"));
  CHECK(read_file(s / "c/summary.tsv") == read_file(s / "a/summary.tsv"));

  // A tampered output no longer matches its recorded digest.
  std::ofstream(s / "a/summary.tsv", std::ios::app) << "# edited\n";
  std::string manifest = read_file(s / "a/manifest.json");
  Manifest edited = parse_manifest(manifest);
  edited.outputs[0].fnv1a64 = "0000000000000000";
  write_file_atomic(s / "a/manifest.json", format_manifest(edited));
  CHECK(invoke({"simulate", "--replay", s / "a/manifest.json"}).code == kExitNumerical);
  CHECK(invoke({"simulate", "--replay", s / "a/manifest.json", "--seed", "4"}).code == kExitValidation);
}
