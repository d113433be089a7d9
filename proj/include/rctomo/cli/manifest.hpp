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
#include <string>
#include <string_view>
#include <vector>

namespace rctomo::cli {

inline constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct RunSeed {
  int rank = 0;
  int run = 0;
  std::uint64_t seed = 0;
};

struct OutputDigest {
  std::string file;  // relative to the output directory
  std::string fnv1a64;
};

/// Everything needed to rerun a simulation and check that it reproduced.
struct Manifest {
  std::string version = kVersion;
  std::string command = "simulate";
  std::string isa;
  std::string config;  // canonical YAML
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::vector<RunSeed> runs;
  std::vector<OutputDigest> outputs;
};

std::string format_manifest(const Manifest& m);
/// Throws ValidationError on malformed JSON or missing fields.
Manifest parse_manifest(const std::string& text);

}  // namespace rctomo::cli
