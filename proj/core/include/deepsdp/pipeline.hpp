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
#include <optional>
#include <vector>

#include "deepsdp/conic_solver.hpp"
#include "deepsdp/formulation.hpp"
#include "deepsdp/network.hpp"
#include "deepsdp/oracle.hpp"
#include "deepsdp/tightness.hpp"

namespace deepsdp {

/// Primal and dual relaxations of one direction, solved in normalized input
/// coordinates (normalize_input) and reported in the original ones.
struct RelaxationSolve {
  conic::ConicSolution primal;  // as solved, normalized coordinates
  conic::ConicSolution dual;    // as solved, normalized coordinates
  DualLayout layout;
  double primal_d = 0.0;  // primal relaxation bound on c^T y
  double dual_d = 0.0;    // DeepSDP dual bound on c^T y
  SymMat gram;            // G* over [1; x^0; x^1; ...]
  /// Generator multipliers for the original X: gamma_j = gamma'_j / scale_j^2.
  Vector input_multipliers;
  bool primal_ok() const { return primal.status == conic::SolveStatus::kOptimal; }
  bool dual_ok() const { return dual.status == conic::SolveStatus::kOptimal; }
};

/// The affine input change leaves both optimal values unchanged; it keeps
/// the multipliers of thin input sets near unit scale.
RelaxationSolve solve_relaxation(const ReluNetwork& net, const InputSet& x, const Vector& c,
                                 const FormulationOptions& form, const conic::SolverOptions& solver);

/// Second-stage multipliers of a ball input from a RelaxationSolve; nullopt
/// when the ball multiplier vanishes.
std::optional<SecondStageMultipliers> ellipsoid_multipliers(const RelaxationSolve& sol);

struct VerifyOptions {
  FormulationOptions formulation{};
  conic::SolverOptions solver{};
  double rank_tol = 1e-6;
  int samples = 10000;
  std::uint64_t seed = 0;
};

/// One direction c of the safety polytope. All bounds are on c^T y.
struct DirectionResult {
  int index = 0;
  Vector c;
  double d_star = 0.0;      // certified bound from the DeepSDP dual
  double primal_obj = 0.0;  // primal relaxation bound
  double dual_obj = 0.0;    // DeepSDP dual bound
  double gap = 0.0;         // |primal_obj - dual_obj|
  int primal_iterations = 0;
  int dual_iterations = 0;
  /// Smallest value of [1; x; f(x)]^T S [1; x; f(x)] over the samples, where
  /// S = [[-2 d*, 0, c^T], [0, 0, 0], [c, 0, 0]]. Equals 2 (c^T f(x) - d*).
  double min_certificate_form = 0.0;
  bool sound = true;  // min_certificate_form >= -1e-6
  RelaxationSolve solve;
};

/// Solves the DeepSDP dual and the primal relaxation for c and checks the
/// bound on opts.samples points of X. Throws SolverFailure unless both
/// solves end OPTIMAL.
DirectionResult verify_direction(const ReluNetwork& net, const InputSet& x, const Vector& c,
                                 int index, const VerifyOptions& opts);

/// The polytope {y | c_l^T y >= d*_l for all l}.
SafetySpec safety_polytope(const std::vector<DirectionResult>& results);

struct Comparison {
  DirectionResult sdp;
  OracleResult oracle;
  ConditionReport conditions;
  TightnessReport tightness;
  std::optional<KktReport> kkt;  // ellipsoid inputs with a rank-1 solution
};

/// verify_direction followed by the oracle, the condition checks of the
/// matching case and the tightness analysis.
Comparison compare_direction(const ReluNetwork& net, const InputSet& x, const Vector& c,
                             int index, const VerifyOptions& opts,
                             const OracleOptions& oracle_opts = {});

}  // namespace deepsdp
