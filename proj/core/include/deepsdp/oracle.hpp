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
#include <string>
#include <vector>

#include "deepsdp/conic_solver.hpp"
#include "deepsdp/network.hpp"

namespace deepsdp {

enum class OracleStatus { kExact, kCapped };

std::string to_string(OracleStatus s);

struct OracleResult {
  double opt_value = 0.0;  // min of 2 c^T f(x) over X
  Vector argmin_x0;
  std::vector<bool> pattern;  // enumerated pattern whose cell holds the minimizer, stacked by layer
  std::int64_t subproblems_solved = 0;
  std::int64_t infeasible_patterns = 0;
  /// Subproblems whose solve ended neither OPTIMAL nor INFEASIBLE_PRIMAL. Their
  /// last iterate is still evaluated, so the value stays attainable.
  std::int64_t unsettled_patterns = 0;
  OracleStatus status = OracleStatus::kExact;
};

struct OracleOptions {
  std::int64_t cap = std::int64_t{1} << 16;
  conic::SolverOptions solver{};
};

/// Minimizes c^T f(x) over X by enumerating activation patterns. Each pattern
/// fixes the network to an affine map on a polyhedral cell; the cell is
/// intersected with X (box bounds as linear rows, a ball as the LMI
/// [[rho I, x - xhat], [(x - xhat)^T, rho]] >= 0) and solved as a conic
/// program. Every candidate is re-evaluated with forward() at its input, so
/// opt_value is attained by argmin_x0. Patterns are visited in increasing
/// binary order and the first strict minimum wins. Throws EmptyInput when no
/// pattern is feasible.
OracleResult exact_minimize(const ReluNetwork& net, const InputSet& x, const Vector& c,
                            const OracleOptions& opts = {});

/// min over n_samples points drawn from X of 2 c^T f(x); +inf when n_samples
/// is 0.
double sample_bound(const ReluNetwork& net, const InputSet& x, const Vector& c, int n_samples,
                    std::uint64_t seed);

}  // namespace deepsdp
