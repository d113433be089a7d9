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

#include "rctomo/cli/state_flags.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

#include "rctomo/errors.hpp"

namespace rctomo::cli {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

[[noreturn]] void fail(const std::string& token, const std::string& reason) {
  throw ValidationError("state '" + token + "': " + reason);
}

int to_int(const std::string& s, const std::string& token) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) fail(token, "expected an integer, got '" + s + "'");
  return v;
}

double to_double(const std::string& s, const std::string& token) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) fail(token, "expected a number, got '" + s + "'");
  return v;
}

struct Parsed {
  ComplexVector amplitudes;
  std::optional<double> weight;
  BasisKind kind;
};

Parsed parse_component(const std::string& token, int dim) {
  std::string body = token;
  Parsed out;
  if (const auto at = token.find('@'); at != std::string::npos) {
    body = token.substr(0, at);
    out.weight = to_double(token.substr(at + 1), token);
  }
  const std::vector<std::string> fields = split(body, ':');
  if (fields.empty() || fields.front().empty()) fail(token, "missing component kind");
  const std::string& kind = fields.front();
  if (kind == "hg" || kind == "bin") {
    if (fields.size() != 2) fail(token, "expected " + kind + ":N");
    const int n = to_int(fields[1], token);
    if (n < 0 || n >= dim) fail(token, "mode index outside [0, " + std::to_string(dim) + ")");
    out.amplitudes = basis_vector(n, dim);
    out.kind = kind == "hg" ? BasisKind::kHgMode : BasisKind::kFrequencyBin;
    return out;
  }
  if (kind == "sup") {
    if (fields.size() != 3) fail(token, "expected sup:I,J,...:SIGNS");
    std::vector<int> indices;
    for (const std::string& s : split(fields[1], ',')) {
      const int n = to_int(s, token);
      if (n < 0 || n >= dim) fail(token, "bin index outside [0, " + std::to_string(dim) + ")");
      indices.push_back(n);
    }
    if (fields[2].size() != indices.size()) fail(token, "need one sign per bin");
    std::vector<int> signs;
    for (char c : fields[2]) {
      if (c != '+' && c != '-') fail(token, "signs must be '+' or '-'");
      signs.push_back(c == '+' ? 1 : -1);
    }
    out.amplitudes = bin_superposition_vector(indices, signs, dim);
    out.kind = BasisKind::kFrequencyBin;
    return out;
  }
  fail(token, "unknown component kind '" + kind + "' (hg, bin, sup, pair)");
}

}  // namespace

StateSpec parse_state(const std::string& text, int dim) {
  if (dim < 1) throw ValidationError("state dimension must be >= 1");
  const std::string whole = trim(text);
  if (whole.empty()) throw ValidationError("state description is empty");
  if (whole.rfind("pair:", 0) == 0) {
    return bin_two_superposition_mixture(to_double(whole.substr(5), whole), dim);
  }

  std::vector<Parsed> parts;
  for (const std::string& raw : split(whole, ';')) {
    const std::string token = trim(raw);
    if (token.empty()) fail(whole, "empty component");
    if (token.rfind("pair:", 0) == 0) fail(token, "pair cannot be combined with other components");
    parts.push_back(parse_component(token, dim));
  }
  const std::size_t weighted = static_cast<std::size_t>(
      std::count_if(parts.begin(), parts.end(), [](const Parsed& p) { return p.weight.has_value(); }));
  if (weighted != 0 && weighted != parts.size()) fail(whole, "give a weight to every component or to none");

  StateSpec spec;
  spec.label = parts.front().kind == BasisKind::kHgMode ? BasisLabel::hg_modes()
                                                        : BasisLabel::frequency_bins(dim);
  for (const Parsed& p : parts) {
    if (p.kind != parts.front().kind) fail(whole, "HG and frequency-bin components cannot be mixed");
    spec.components.push_back({p.amplitudes, p.weight.value_or(1.0 / static_cast<double>(parts.size()))});
  }
  spec.validate();
  return spec;
}

}  // namespace rctomo::cli
