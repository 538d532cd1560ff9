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
#include <iosfwd>
#include <string>
#include <vector>

#include "deepsdp/conic_solver.hpp"

namespace deepsdp {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 0;
  conic::SolverOptions solver{};
  int soundness_samples = 10000;
  /// Progress lines, one per finished criterion, when set.
  std::ostream* log = nullptr;
};

/// Runs the ten acceptance criteria in order. Deterministic for a fixed seed.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "PASS  3 rectangle single-layer tightness: <detail> (1.23 s)"
std::string format_line(const CriterionResult& r);

}  // namespace deepsdp
