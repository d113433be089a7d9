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

#include "rctomo/cli/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rctomo/errors.hpp"

namespace rctomo::cli {
namespace {

constexpr const char* kTrajectoryHeader =
    "run_id\tk\tbasis_seed\ts_cvx\tfidelity\tlog_likelihood\tml_converged\tis_ic";
constexpr const char* kAggregateHeader =
    "rank\tk\ts_cvx_mean\ts_cvx_std\tfidelity_mean\tfidelity_std";
constexpr const char* kSummaryHeader = "rank\truns\tic_runs\tmean_k_ic";

[[noreturn]] void fail_at(int line, const std::string& reason) {
  throw ValidationError("line " + std::to_string(line) + ": " + reason);
}

std::vector<std::string> tokens(const std::string& line, char sep) {
  std::vector<std::string> out;
  if (sep == '\t') {
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, '\t')) out.push_back(field);
    if (!line.empty() && line.back() == '\t') out.emplace_back();
    return out;
  }
  std::istringstream in(line);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

template <typename T>
T parse_number(const std::string& s, int line, const char* what) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    fail_at(line, std::string("expected ") + what + ", got '" + s + "'");
  }
  return v;
}

double parse_real(const std::string& s, int line) {
  if (s == "nan") return std::nan("");
  return parse_number<double>(s, line, "a number");
}

bool parse_flag(const std::string& s, int line) {
  if (s == "1") return true;
  if (s == "0") return false;
  fail_at(line, "expected 0 or 1, got '" + s + "'");
}

/// Non-empty lines with their 1-based numbers; '#' lines are returned
/// separately when `comments` is given, otherwise dropped.
std::vector<std::pair<int, std::string>> content_lines(
    const std::string& text, std::vector<std::pair<int, std::string>>* comments = nullptr) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  int number = 0;
  for (std::string line; std::getline(in, line);) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (comments) comments->emplace_back(number, line.substr(first + 1));
      continue;
    }
    out.emplace_back(number, line);
  }
  return out;
}

void expect_header(const std::vector<std::pair<int, std::string>>& lines, const char* header,
                   const char* kind) {
  if (lines.empty()) throw ValidationError(std::string(kind) + " file is empty");
  if (lines.front().second != header) {
    fail_at(lines.front().first, std::string("expected the ") + kind + " header '" + header + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_trajectories(const std::vector<RctTrajectory>& runs, std::optional<int> rank) {
  std::vector<TrajectoryRow> rows;
  for (const RctTrajectory& t : runs) {
    for (const StepRecord& s : t.steps) {
      rows.push_back({t.run_id, s.k, s.basis_seed, s.s_cvx, s.fidelity, s.log_likelihood,
                      s.ml_converged, s.is_ic});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TrajectoryRow& a, const TrajectoryRow& b) {
    return std::pair(a.run_id, a.k) < std::pair(b.run_id, b.k);
  });
  std::ostringstream out;
  if (rank) out << "# rank: " << *rank << '\n';
  out << kTrajectoryHeader << '\n';
  for (const TrajectoryRow& r : rows) {
    out << r.run_id << '\t' << r.k << '\t' << r.basis_seed << '\t' << format_double(r.s_cvx) << '\t'
        << format_double(r.fidelity) << '\t' << format_double(r.log_likelihood) << '\t'
        << (r.ml_converged ? 1 : 0) << '\t' << (r.is_ic ? 1 : 0) << '\n';
  }
  return out.str();
}

TrajectoryTable parse_trajectories(const std::string& text) {
  std::vector<std::pair<int, std::string>> comments;
  const auto lines = content_lines(text, &comments);
  TrajectoryTable table;
  for (const auto& [number, body] : comments) {
    const auto t = tokens(body, ' ');
    if (t.size() == 2 && t[0] == "rank:") table.rank = parse_number<int>(t[1], number, "an integer");
  }
  expect_header(lines, kTrajectoryHeader, "trajectory");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, body] = lines[i];
    const auto f = tokens(body, '\t');
    if (f.size() != 8) fail_at(number, "expected 8 tab-separated fields, got " + std::to_string(f.size()));
    TrajectoryRow r;
    r.run_id = parse_number<int>(f[0], number, "an integer run_id");
    r.k = parse_number<int>(f[1], number, "an integer k");
    r.basis_seed = parse_number<std::uint64_t>(f[2], number, "an unsigned basis_seed");
    r.s_cvx = parse_real(f[3], number);
    r.fidelity = parse_real(f[4], number);
    r.log_likelihood = parse_real(f[5], number);
    r.ml_converged = parse_flag(f[6], number);
    r.is_ic = parse_flag(f[7], number);
    if (!table.rows.empty()) {
      const TrajectoryRow& p = table.rows.back();
      if (std::pair(r.run_id, r.k) <= std::pair(p.run_id, p.k)) fail_at(number, "rows must be sorted by (run_id, k)");
    }
    table.rows.push_back(r);
  }
  return table;
}

std::vector<RctTrajectory> trajectories_from_rows(const std::vector<TrajectoryRow>& rows) {
  std::vector<RctTrajectory> out;
  for (const TrajectoryRow& r : rows) {
    if (out.empty() || out.back().run_id != r.run_id) {
      out.emplace_back();
      out.back().run_id = r.run_id;
    }
    RctTrajectory& t = out.back();
    StepRecord s;
    s.k = r.k;
    s.basis_seed = r.basis_seed;
    s.s_cvx = r.s_cvx;
    s.fidelity = r.fidelity;
    s.log_likelihood = r.log_likelihood;
    s.ml_converged = r.ml_converged;
    s.is_ic = r.is_ic;
    t.steps.push_back(s);
    if (r.is_ic && !t.k_ic) t.k_ic = r.k;
  }
  return out;
}

std::string format_aggregate(const std::vector<AggregateCurve>& curves) {
  std::ostringstream out;
  out << kAggregateHeader << '\n';
  for (const AggregateCurve& c : curves) {
    for (std::size_t k = 0; k < c.s_cvx_mean.size(); ++k) {
      out << c.rank << '\t' << k + 1 << '\t' << format_double(c.s_cvx_mean[k]) << '\t'
          << format_double(c.s_cvx_std[k]) << '\t' << format_double(c.fidelity_mean[k]) << '\t'
          << format_double(c.fidelity_std[k]) << '\n';
    }
  }
  return out.str();
}

std::string format_summary(const std::vector<AggregateCurve>& curves) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const AggregateCurve& c : curves) {
    out << c.rank << '\t' << c.runs << '\t' << c.ic_runs << '\t'
        << (c.mean_k_ic ? format_double(*c.mean_k_ic) : "NA") << '\n';
  }
  return out.str();
}

std::vector<AggregateCurve> parse_aggregate(const std::string& aggregate_text,
                                            const std::string& summary_text) {
  std::vector<AggregateCurve> curves;
  std::map<int, std::size_t> by_rank;
  const auto summary = content_lines(summary_text);
  expect_header(summary, kSummaryHeader, "summary");
  for (std::size_t i = 1; i < summary.size(); ++i) {
    const auto& [number, body] = summary[i];
    const auto f = tokens(body, '\t');
    if (f.size() != 4) fail_at(number, "expected 4 tab-separated fields");
    AggregateCurve c;
    c.rank = parse_number<int>(f[0], number, "an integer rank");
    c.runs = parse_number<int>(f[1], number, "an integer run count");
    c.ic_runs = parse_number<int>(f[2], number, "an integer run count");
    if (f[3] != "NA") c.mean_k_ic = parse_real(f[3], number);
    if (!by_rank.emplace(c.rank, curves.size()).second) fail_at(number, "duplicate rank");
    curves.push_back(c);
  }
  const auto rows = content_lines(aggregate_text);
  expect_header(rows, kAggregateHeader, "aggregate");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& [number, body] = rows[i];
    const auto f = tokens(body, '\t');
    if (f.size() != 6) fail_at(number, "expected 6 tab-separated fields");
    const int rank = parse_number<int>(f[0], number, "an integer rank");
    const auto it = by_rank.find(rank);
    if (it == by_rank.end()) fail_at(number, "rank " + f[0] + " is missing from the summary");
    AggregateCurve& c = curves[it->second];
    const int k = parse_number<int>(f[1], number, "an integer k");
    if (k != static_cast<int>(c.s_cvx_mean.size()) + 1) fail_at(number, "k must count up from 1 per rank");
    c.s_cvx_mean.push_back(parse_real(f[2], number));
    c.s_cvx_std.push_back(parse_real(f[3], number));
    c.fidelity_mean.push_back(parse_real(f[4], number));
    c.fidelity_std.push_back(parse_real(f[5], number));
  }
  return curves;
}

std::string format_grid(const GridTable& grid) {
  if (grid.values.rows() != static_cast<Eigen::Index>(grid.row_axis.size()) ||
      grid.values.cols() != static_cast<Eigen::Index>(grid.col_axis.size())) {
    throw ValidationError("grid values do not match the axes");
  }
  std::ostringstream out;
  out << grid.corner;
  for (double w : grid.col_axis) out << '\t' << format_double(w);
  out << '\n';
  for (std::size_t i = 0; i < grid.row_axis.size(); ++i) {
    out << format_double(grid.row_axis[i]);
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      out << '\t' << format_double(grid.values(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
  return out.str();
}

GridTable parse_grid(const std::string& text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ValidationError("grid file is empty");
  GridTable grid;
  const auto head = tokens(lines.front().second, '\t');
  if (head.size() < 2) fail_at(lines.front().first, "grid header needs at least one column");
  grid.corner = head.front();
  for (std::size_t j = 1; j < head.size(); ++j) {
    grid.col_axis.push_back(parse_real(head[j], lines.front().first));
    if (j > 1 && !(grid.col_axis[j - 1] > grid.col_axis[j - 2])) {
      fail_at(lines.front().first, "column axis must be strictly increasing");
    }
  }
  const std::size_t cols = grid.col_axis.size();
  grid.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, body] = lines[i];
    const auto f = tokens(body, '\t');
    if (f.size() != cols + 1) fail_at(number, "grid row has " + std::to_string(f.size()) + " fields, expected " + std::to_string(cols + 1));
    grid.row_axis.push_back(parse_real(f[0], number));
    if (i > 1 && !(grid.row_axis[i - 1] > grid.row_axis[i - 2])) fail_at(number, "row axis must be strictly increasing");
    for (std::size_t j = 0; j < cols; ++j) {
      grid.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j)) = parse_real(f[j + 1], number);
    }
  }
  if (grid.row_axis.empty()) throw ValidationError("grid file has no rows");
  return grid;
}

std::string format_dataset(const Dataset& data) {
  data.validate();
  const int d = data.dim();
  std::ostringstream out;
  out << "# " << data.size() << " bases, dimension " << d << '\n';
  for (std::size_t k = 0; k < data.size(); ++k) {
    const MeasurementBasis& b = data.bases[k];
    const CountRecord& r = data.records[k];
    out << "seed " << b.seed << '\n';
    for (int l = 0; l < d; ++l) {
      for (int i = 0; i < d; ++i) {
        const Complex c = b.vectors(i, l);
        out << (i ? " " : "") << format_double(c.real()) << ' ' << format_double(c.imag());
      }
      out << '\n';
    }
    for (int l = 0; l < d; ++l) out << (l ? " " : "") << r.counts[static_cast<std::size_t>(l)];
    out << '\n';
    if (r.frequencies != CountRecord::from_counts(r.basis_index, r.counts).frequencies) {
      out << "frequencies";
      for (double f : r.frequencies) out << ' ' << format_double(f);
      out << '\n';
    }
  }
  return out.str();
}

Dataset parse_dataset(const std::string& text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ValidationError("dataset is empty");
  Dataset data;
  int d = 0;
  std::size_t i = 0;
  while (i < lines.size()) {
    const int block_line = lines[i].first;
    std::uint64_t seed = 0;
    auto f = tokens(lines[i].second, ' ');
    if (f.front() == "seed") {
      if (f.size() != 2) fail_at(lines[i].first, "expected 'seed N'");
      seed = parse_number<std::uint64_t>(f[1], lines[i].first, "an unsigned seed");
      if (++i == lines.size()) fail_at(lines[i - 1].first, "seed line without a basis");
      f = tokens(lines[i].second, ' ');
    }
    if (d == 0) {
      if (f.size() % 2 != 0) fail_at(lines[i].first, "a basis vector needs (re, im) pairs");
      d = static_cast<int>(f.size() / 2);
    }
    MeasurementBasis basis;
    basis.seed = seed;
    basis.vectors.resize(d, d);
    for (int l = 0; l < d; ++l, ++i) {
      if (i == lines.size()) fail_at(lines.back().first, "basis block ends after " + std::to_string(l) + " of " + std::to_string(d) + " vectors");
      const auto& [number, body] = lines[i];
      const auto v = tokens(body, ' ');
      if (static_cast<int>(v.size()) != 2 * d) {
        fail_at(number, "expected " + std::to_string(2 * d) + " numbers for a basis vector, got " + std::to_string(v.size()));
      }
      for (int c = 0; c < d; ++c) {
        basis.vectors(c, l) = Complex(parse_real(v[static_cast<std::size_t>(2 * c)], number),
                                      parse_real(v[static_cast<std::size_t>(2 * c + 1)], number));
      }
    }
    if (i == lines.size()) fail_at(lines.back().first, "basis block is missing its counts line");
    const auto& [count_line, count_body] = lines[i++];
    const auto cs = tokens(count_body, ' ');
    if (static_cast<int>(cs.size()) != d) {
      fail_at(count_line, "expected " + std::to_string(d) + " counts, got " + std::to_string(cs.size()));
    }
    std::vector<long long> counts;
    for (const std::string& c : cs) counts.push_back(parse_number<long long>(c, count_line, "an integer count"));
    const int index = static_cast<int>(data.records.size());
    CountRecord record;
    try {
      record = CountRecord::from_counts(index, counts);
    } catch (const ValidationError& e) {
      fail_at(count_line, e.what());
    }
    if (i < lines.size() && tokens(lines[i].second, ' ').front() == "frequencies") {
      const auto& [number, body] = lines[i++];
      const auto fs = tokens(body, ' ');
      if (static_cast<int>(fs.size()) != d + 1) fail_at(number, "expected " + std::to_string(d) + " frequencies");
      for (int l = 0; l < d; ++l) record.frequencies[static_cast<std::size_t>(l)] = parse_real(fs[static_cast<std::size_t>(l + 1)], number);
    }
    try {
      basis.validate(1e-8);
      Dataset single{{basis}, {record}};
      single.validate();
    } catch (const ValidationError& e) {
      fail_at(block_line, std::string("basis ") + std::to_string(index) + ": " + e.what());
    }
    data.bases.push_back(std::move(basis));
    data.records.push_back(std::move(record));
  }
  return data;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + temp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ValidationError("failed writing '" + temp.string() + "'");
  }
  fs::rename(temp, target);
}

}  // namespace rctomo::cli
