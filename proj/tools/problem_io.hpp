// Copyright 2026 The deepsdp Authors
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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "deepsdp/network.hpp"

namespace deepsdp::cli {

/// Malformed problem file or option value. Maps to exit code 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run options. Values from the problem file's "options" object are applied
/// first and explicit command line flags override them.
struct RunOptions {
  bool cuts = false;
  double tol = 1e-8;
  double rank_tol = 1e-6;
  int samples = 10000;
  std::uint64_t seed = 0;
};

struct Problem {
  ReluNetwork net;
  InputSet input;
  std::vector<Vector> directions;
  RunOptions options;
};

/// {"network": {"layers": [{"W": [[...]], "b": [...]}, ...]},
///  "input_set": {"type": "interval", "lo": a, "hi": b}
///             | {"type": "rectangle", "center": [...], "radii": [...]}
///             | {"type": "ellipsoid", "center": [...], "radius": r},
///  "directions": [[...], ...], "options": {...}}
Problem parse_problem(const nlohmann::json& j);
Problem load_problem(const std::filesystem::path& path);

/// Reads the known keys of an "options" object into opts.
void apply_options(const nlohmann::json& j, RunOptions& opts);
/// Throws ParseError unless tol, rank_tol > 0 and samples >= 0.
void validate(const RunOptions& opts);

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const InputSet& x);
nlohmann::json to_json(const ReluNetwork& net);
Vector vector_from_json(const nlohmann::json& j, const char* what);

/// Finite numbers pass through; NaN and infinities become null so that a
/// report survives a write and re-read unchanged.
nlohmann::json number(double v);

}  // namespace deepsdp::cli
