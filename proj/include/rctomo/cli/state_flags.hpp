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

#include <string>

#include "rctomo/states.hpp"

namespace rctomo::cli {

/// Parses a compact state description. Components are separated by ';':
///   hg:N          HG mode N
///   bin:N         frequency bin N
///   sup:I,J,K:S   equal-amplitude bin superposition with sign string S (+/-)
///   pair:L        two-superposition bin mixture with larger eigenvalue L
/// Each of the first three may carry a weight suffix "@W". Without any weights
/// the components are mixed equally; otherwise every component needs one.
/// HG and bin components cannot be combined. Throws ValidationError naming the
/// offending token.
StateSpec parse_state(const std::string& text, int dim);

}  // namespace rctomo::cli
