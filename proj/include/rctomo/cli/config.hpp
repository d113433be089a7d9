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

#include <optional>
#include <string>
#include <vector>

#include "rctomo/rct.hpp"

namespace rctomo::cli {

struct OutputOptions {
  std::string directory = "rctomo-out";
  bool trajectories = true;
  bool aggregate = true;
  /// One dataset file per run with everything it measured.
  bool datasets = false;
};

/// Contents of an experiment file. The state section either fixes one state
/// (`spec` string or explicit `components`) or describes a rank sweep over a
/// state family (`family` + `ranks`).
struct ExperimentConfig {
  int dim = 10;
  StateFamily family = StateFamily::kHgModes;
  std::vector<int> ranks{1};
  std::optional<std::string> state_text;
  std::optional<StateSpec> explicit_state;
  /// rct.state is ignored; see resolved_state().
  RctConfig rct;
  int workers = 0;  // 0: one per logical processor
  OutputOptions output;

  bool is_sweep() const { return !state_text && !explicit_state; }
  /// The fixed state; throws ValidationError in sweep mode.
  StateSpec resolved_state() const;
  /// RctConfig with the fixed state filled in (family default in sweep mode).
  RctConfig engine_config() const;
  int effective_workers() const;
  void validate() const;
};

/// Parses YAML text. Unknown keys, type mismatches and invalid values raise
/// ValidationError as "<source>:<line>:<column>: <key path>: <reason>".
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

/// Canonical YAML form of the effective config; parse_config inverts it.
std::string emit_config(const ExperimentConfig& config);

}  // namespace rctomo::cli
