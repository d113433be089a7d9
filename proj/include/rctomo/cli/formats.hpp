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

// Text file formats. Every number is written with 17 significant digits so a
// parse of an emitted file reproduces the in-memory doubles exactly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rctomo/measurement.hpp"
#include "rctomo/rct.hpp"

namespace rctomo::cli {

std::string format_double(double v);

// Trajectory table: one header row, tab-separated, rows sorted by (run_id, k).
// Leading "# key: value" lines carry metadata (currently the rank).

struct TrajectoryRow {
  int run_id = 0;
  int k = 0;
  std::uint64_t basis_seed = 0;
  double s_cvx = 0.0;
  double fidelity = 0.0;
  double log_likelihood = 0.0;
  bool ml_converged = false;
  bool is_ic = false;

  bool operator==(const TrajectoryRow&) const = default;
};

struct TrajectoryTable {
  std::optional<int> rank;
  std::vector<TrajectoryRow> rows;
};

std::string format_trajectories(const std::vector<RctTrajectory>& runs, std::optional<int> rank);
TrajectoryTable parse_trajectories(const std::string& text);

/// Rebuilds per-run step lists (k_ic = first IC step) for aggregation.
std::vector<RctTrajectory> trajectories_from_rows(const std::vector<TrajectoryRow>& rows);

// Aggregate table (rank, k, means and standard deviations) and run summary
// (rank, runs, ic_runs, mean_k_ic with "NA" when no run reached IC).
std::string format_aggregate(const std::vector<AggregateCurve>& curves);
std::string format_summary(const std::vector<AggregateCurve>& curves);
std::vector<AggregateCurve> parse_aggregate(const std::string& aggregate_text,
                                            const std::string& summary_text);

/// Labelled matrix: first row holds the column axis, first column the row axis.
/// Both axes are strictly increasing.
struct GridTable {
  std::string corner;
  std::vector<double> row_axis;
  std::vector<double> col_axis;
  RealMatrix values;
};

std::string format_grid(const GridTable& grid);
GridTable parse_grid(const std::string& text);

// Dataset: '#' comments and blank lines are ignored. Each basis is a block of
// d lines holding one basis vector each as d (re, im) pairs, followed by a line
// of d counts and optionally a line "frequencies f_0 ... f_{d-1}" carrying
// exact relative frequencies. Errors cite the 1-based line number.
std::string format_dataset(const Dataset& data);
Dataset parse_dataset(const std::string& text);

std::string read_file(const std::string& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rctomo::cli
