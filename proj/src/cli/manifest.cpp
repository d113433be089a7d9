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

#include "rctomo/cli/manifest.hpp"

#include <cstdio>

#include <json.hpp>

#include "rctomo/errors.hpp"

namespace rctomo::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_manifest(const Manifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "rctomo";
  j["version"] = m.version;
  j["command"] = m.command;
  j["isa"] = m.isa;
  j["config_hash"] = m.config_hash;
  j["master_seed"] = m.master_seed;
  j["config"] = m.config;
  j["runs"] = nlohmann::ordered_json::array();
  for (const RunSeed& r : m.runs) j["runs"].push_back({{"rank", r.rank}, {"run", r.run}, {"seed", r.seed}});
  j["outputs"] = nlohmann::ordered_json::array();
  for (const OutputDigest& o : m.outputs) j["outputs"].push_back({{"file", o.file}, {"fnv1a64", o.fnv1a64}});
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("tool", "") != "rctomo") throw ValidationError("manifest was not written by rctomo");
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.isa = j.at("isa").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.config = j.at("config").get<std::string>();
    for (const auto& r : j.at("runs")) {
      m.runs.push_back({r.at("rank").get<int>(), r.at("run").get<int>(), r.at("seed").get<std::uint64_t>()});
    }
    for (const auto& o : j.at("outputs")) {
      m.outputs.push_back({o.at("file").get<std::string>(), o.at("fnv1a64").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
  if (hex64(fnv1a64(m.config)) != m.config_hash) {
    throw ValidationError("manifest config does not match its recorded hash");
  }
  return m;
}

}  // namespace rctomo::cli
