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

#include "rctomo/cli/config.hpp"

#include <cmath>
#include <set>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "rctomo/cli/formats.hpp"
#include "rctomo/cli/state_flags.hpp"
#include "rctomo/errors.hpp"

namespace rctomo::cli {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& reason) const {
    const YAML::Mark m = node.Mark();
    std::string where = source_;
    if (!m.is_null()) where += ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
    throw ValidationError(where + ": " + path + ": " + reason);
  }

  /// Rejects keys outside `known`; each section must be a mapping.
  void check_keys(const YAML::Node& map, const std::string& path, const std::set<std::string>& known) const {
    if (!map.IsMap()) fail(map, path, "expected a mapping");
    for (const auto& entry : map) {
      const std::string key = entry.first.as<std::string>();
      if (!known.count(key)) {
        fail(entry.first, path.empty() ? key : path + "." + key, "unknown key");
      }
    }
  }

  template <typename T>
  void read(const YAML::Node& map, const std::string& section, const char* key, T& out,
            const char* expected) const {
    const YAML::Node node = map[key];
    if (!node) return;
    const std::string path = section + "." + key;
    if (!node.IsScalar()) fail(node, path, std::string("expected ") + expected);
    try {
      out = node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, path, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
    }
  }

  /// Runs `check` and re-raises its ValidationError at the node's location.
  template <typename F>
  void validated(const YAML::Node& node, const std::string& path, F&& check) const {
    try {
      check();
    } catch (const ValidationError& e) {
      fail(node, path, e.what());
    }
  }

 private:
  std::string source_;
};

StateFamily parse_family(const std::string& s) {
  if (s == "hg") return StateFamily::kHgModes;
  if (s == "bins") return StateFamily::kFrequencyBins;
  throw ValidationError("expected 'hg' or 'bins', got '" + s + "'");
}

const char* family_name(StateFamily f) { return f == StateFamily::kHgModes ? "hg" : "bins"; }

MlAlgorithm parse_algorithm(const std::string& s) {
  if (s == "barrier") return MlAlgorithm::kBarrierNewton;
  if (s == "rrho") return MlAlgorithm::kDilutedRrho;
  throw ValidationError("expected 'barrier' or 'rrho', got '" + s + "'");
}

const char* algorithm_name(MlAlgorithm a) { return a == MlAlgorithm::kBarrierNewton ? "barrier" : "rrho"; }

StateSpec parse_components(const Reader& r, const YAML::Node& list, const std::string& basis) {
  if (!list.IsSequence() || list.size() == 0) r.fail(list, "state.components", "expected a non-empty list");
  StateSpec spec;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const YAML::Node item = list[i];
    const std::string path = "state.components[" + std::to_string(i) + "]";
    r.check_keys(item, path, {"weight", "amplitudes"});
    StateComponent c;
    r.read(item, path, "weight", c.weight, "a number");
    const YAML::Node amps = item["amplitudes"];
    if (!amps || !amps.IsSequence()) r.fail(item, path + ".amplitudes", "expected a list of [re, im] pairs");
    c.amplitudes.resize(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t j = 0; j < amps.size(); ++j) {
      const YAML::Node pair = amps[j];
      const std::string apath = path + ".amplitudes[" + std::to_string(j) + "]";
      if (!pair.IsSequence() || pair.size() != 2) r.fail(pair, apath, "expected [re, im]");
      try {
        c.amplitudes(static_cast<Eigen::Index>(j)) = Complex(pair[0].as<double>(), pair[1].as<double>());
      } catch (const YAML::BadConversion&) {
        r.fail(pair, apath, "expected two numbers");
      }
    }
    spec.components.push_back(std::move(c));
  }
  const int d = spec.dim();
  spec.label = basis == "bins" ? BasisLabel::frequency_bins(d) : BasisLabel::hg_modes();
  r.validated(list, "state.components", [&] { spec.validate(); });
  return spec;
}

}  // namespace

StateSpec ExperimentConfig::resolved_state() const {
  if (explicit_state) {
    if (explicit_state->dim() != dim) {
      throw ValidationError("state.components have dimension " + std::to_string(explicit_state->dim()) +
                            " but state.dim is " + std::to_string(dim));
    }
    return *explicit_state;
  }
  if (state_text) return parse_state(*state_text, dim);
  throw ValidationError("config describes a rank sweep, not a fixed state");
}

RctConfig ExperimentConfig::engine_config() const {
  RctConfig c = rct;
  if (!is_sweep()) {
    c.state = resolved_state();
  } else {
    Rng rng(0);
    c.state = random_rank_state(family, ranks.front(), dim, rng);
  }
  return c;
}

int ExperimentConfig::effective_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void ExperimentConfig::validate() const {
  if (dim < 2) throw ValidationError("state.dim must be >= 2");
  if (workers < 0) throw ValidationError("rct.workers must be >= 0");
  if (state_text && explicit_state) throw ValidationError("state: give either spec or components");
  if (is_sweep()) {
    if (ranks.empty()) throw ValidationError("state.ranks must not be empty");
    for (int r : ranks) {
      if (r < 1 || r > dim) throw ValidationError("state.ranks entries must lie in [1, state.dim]");
      Rng rng(0);
      (void)random_rank_state(family, r, dim, rng);
    }
  }
  if (output.directory.empty()) throw ValidationError("output.directory must not be empty");
  engine_config().validate();
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError(source + ":" + std::to_string(e.mark.line + 1) + ":" +
                          std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  ExperimentConfig cfg;
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  r.check_keys(root, "", {"state", "qpg", "rct", "output"});

  if (const YAML::Node s = root["state"]) {
    r.check_keys(s, "state", {"dim", "basis", "family", "ranks", "spec", "components"});
    r.read(s, "state", "dim", cfg.dim, "an integer");
    if (const YAML::Node f = s["family"]) {
      r.validated(f, "state.family", [&] { cfg.family = parse_family(f.as<std::string>()); });
    }
    if (const YAML::Node ranks = s["ranks"]) {
      cfg.ranks.clear();
      if (ranks.IsScalar()) {
        int v = 0;
        r.read(s, "state", "ranks", v, "an integer or a list of integers");
        cfg.ranks.push_back(v);
      } else if (ranks.IsSequence()) {
        for (std::size_t i = 0; i < ranks.size(); ++i) {
          try {
            cfg.ranks.push_back(ranks[i].as<int>());
          } catch (const YAML::BadConversion&) {
            r.fail(ranks[i], "state.ranks[" + std::to_string(i) + "]", "expected an integer");
          }
        }
      } else {
        r.fail(ranks, "state.ranks", "expected an integer or a list of integers");
      }
    }
    std::string basis = "hg";
    r.read(s, "state", "basis", basis, "'hg' or 'bins'");
    if (basis != "hg" && basis != "bins") r.fail(s["basis"], "state.basis", "expected 'hg' or 'bins'");
    if (const YAML::Node spec = s["spec"]) {
      std::string text_value;
      r.read(s, "state", "spec", text_value, "a state string");
      cfg.state_text = text_value;
      r.validated(spec, "state.spec", [&] { (void)parse_state(text_value, cfg.dim); });
    }
    if (const YAML::Node comps = s["components"]) cfg.explicit_state = parse_components(r, comps, basis);
    if (cfg.state_text && cfg.explicit_state) r.fail(s, "state", "give either spec or components");
    if ((cfg.state_text || cfg.explicit_state) && (s["ranks"] || s["family"])) {
      r.fail(s, "state", "family and ranks describe a sweep and cannot be combined with a fixed state");
    }
  }

  if (const YAML::Node q = root["qpg"]) {
    r.check_keys(q, "qpg", {"theta", "clicks_per_basis", "noiseless", "background_rate"});
    r.read(q, "qpg", "theta", cfg.rct.qpg.theta, "a number");
    r.read(q, "qpg", "clicks_per_basis", cfg.rct.qpg.clicks_per_basis, "an integer");
    r.read(q, "qpg", "noiseless", cfg.rct.qpg.noiseless, "true or false");
    r.read(q, "qpg", "background_rate", cfg.rct.qpg.background_rate, "a number");
    if (cfg.rct.qpg.clicks_per_basis <= 0) r.fail(q["clicks_per_basis"], "qpg.clicks_per_basis", "must be positive");
    if (!std::isfinite(cfg.rct.qpg.theta)) r.fail(q["theta"], "qpg.theta", "must be finite");
    if (cfg.rct.qpg.background_rate != 0.0) r.fail(q["background_rate"], "qpg.background_rate", "must be 0 in this model");
  }

  if (const YAML::Node c = root["rct"]) {
    r.check_keys(c, "rct", {"runs", "seed", "max_bases", "threshold", "z_draws", "band_sigmas",
                            "mix_components", "stop_at_ic", "workers", "ml_algorithm",
                            "ml_tolerance", "ml_max_iterations"});
    r.read(c, "rct", "runs", cfg.rct.runs, "an integer");
    r.read(c, "rct", "seed", cfg.rct.seed, "an unsigned 64-bit integer");
    r.read(c, "rct", "max_bases", cfg.rct.max_bases, "an integer");
    r.read(c, "rct", "threshold", cfg.rct.relative_threshold, "a number");
    r.read(c, "rct", "z_draws", cfg.rct.z_draws, "an integer");
    r.read(c, "rct", "band_sigmas", cfg.rct.band_sigmas, "a number");
    r.read(c, "rct", "mix_components", cfg.rct.mix_components, "true or false");
    r.read(c, "rct", "stop_at_ic", cfg.rct.stop_at_ic, "true or false");
    r.read(c, "rct", "workers", cfg.workers, "an integer");
    if (const YAML::Node a = c["ml_algorithm"]) {
      r.validated(a, "rct.ml_algorithm", [&] { cfg.rct.ml.algorithm = parse_algorithm(a.as<std::string>()); });
    }
    r.read(c, "rct", "ml_tolerance", cfg.rct.ml.tolerance, "a number");
    r.read(c, "rct", "ml_max_iterations", cfg.rct.ml.max_iterations, "an integer");
    const RctConfig& v = cfg.rct;
    if (v.runs < 1) r.fail(c["runs"], "rct.runs", "must be >= 1");
    if (v.max_bases < 0) r.fail(c["max_bases"], "rct.max_bases", "must be >= 0 (0 means 2 d)");
    if (!(v.relative_threshold > 0.0)) r.fail(c["threshold"], "rct.threshold", "must be positive");
    if (v.z_draws < 1) r.fail(c["z_draws"], "rct.z_draws", "must be >= 1");
    if (!(v.band_sigmas >= 0.0)) r.fail(c["band_sigmas"], "rct.band_sigmas", "must be >= 0");
    if (!(cfg.rct.ml.tolerance > 0.0)) r.fail(c["ml_tolerance"], "rct.ml_tolerance", "must be positive");
    if (cfg.rct.ml.max_iterations < 0) r.fail(c["ml_max_iterations"], "rct.ml_max_iterations", "must be >= 0");
    if (cfg.workers < 0) r.fail(c["workers"], "rct.workers", "must be >= 0");
  }

  if (const YAML::Node o = root["output"]) {
    r.check_keys(o, "output", {"directory", "trajectories", "aggregate", "datasets"});
    r.read(o, "output", "directory", cfg.output.directory, "a path");
    r.read(o, "output", "trajectories", cfg.output.trajectories, "true or false");
    r.read(o, "output", "aggregate", cfg.output.aggregate, "true or false");
    r.read(o, "output", "datasets", cfg.output.datasets, "true or false");
  }

  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

std::string emit_config(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "state" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dim" << YAML::Value << cfg.dim;
  if (cfg.state_text) {
    out << YAML::Key << "spec" << YAML::Value << YAML::DoubleQuoted << *cfg.state_text;
  } else if (cfg.explicit_state) {
    const StateSpec& s = *cfg.explicit_state;
    out << YAML::Key << "basis" << YAML::Value
        << (s.label.kind == BasisKind::kFrequencyBin ? "bins" : "hg");
    out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
    for (const StateComponent& c : s.components) {
      out << YAML::BeginMap << YAML::Key << "weight" << YAML::Value << c.weight;
      out << YAML::Key << "amplitudes" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (Eigen::Index i = 0; i < c.amplitudes.size(); ++i) {
        out << YAML::Flow << YAML::BeginSeq << c.amplitudes(i).real() << c.amplitudes(i).imag() << YAML::EndSeq;
      }
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
  } else {
    out << YAML::Key << "family" << YAML::Value << family_name(cfg.family);
    out << YAML::Key << "ranks" << YAML::Value << YAML::Flow << cfg.ranks;
  }
  out << YAML::EndMap;

  const QpgConfig& q = cfg.rct.qpg;
  out << YAML::Key << "qpg" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "theta" << YAML::Value << q.theta;
  out << YAML::Key << "clicks_per_basis" << YAML::Value << q.clicks_per_basis;
  out << YAML::Key << "noiseless" << YAML::Value << q.noiseless;
  out << YAML::Key << "background_rate" << YAML::Value << q.background_rate;
  out << YAML::EndMap;

  const RctConfig& c = cfg.rct;
  out << YAML::Key << "rct" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "runs" << YAML::Value << c.runs;
  out << YAML::Key << "seed" << YAML::Value << static_cast<unsigned long long>(c.seed);
  out << YAML::Key << "max_bases" << YAML::Value << c.max_bases;
  out << YAML::Key << "threshold" << YAML::Value << c.relative_threshold;
  out << YAML::Key << "z_draws" << YAML::Value << c.z_draws;
  out << YAML::Key << "band_sigmas" << YAML::Value << c.band_sigmas;
  out << YAML::Key << "mix_components" << YAML::Value << c.mix_components;
  out << YAML::Key << "stop_at_ic" << YAML::Value << c.stop_at_ic;
  out << YAML::Key << "workers" << YAML::Value << cfg.workers;
  out << YAML::Key << "ml_algorithm" << YAML::Value << algorithm_name(c.ml.algorithm);
  out << YAML::Key << "ml_tolerance" << YAML::Value << c.ml.tolerance;
  out << YAML::Key << "ml_max_iterations" << YAML::Value << c.ml.max_iterations;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << YAML::DoubleQuoted << cfg.output.directory;
  out << YAML::Key << "trajectories" << YAML::Value << cfg.output.trajectories;
  out << YAML::Key << "aggregate" << YAML::Value << cfg.output.aggregate;
  out << YAML::Key << "datasets" << YAML::Value << cfg.output.datasets;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace rctomo::cli
