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

#include <optional>
#include <string>
#include <vector>

#include "deepsdp/conic_solver.hpp"
#include "deepsdp/formulation.hpp"
#include "deepsdp/linalg.hpp"
#include "deepsdp/network.hpp"

namespace deepsdp {

enum class Verdict { kCertifiedTight, kNumericallyTight, kGapDetected, kUnknown };

std::string to_string(Verdict v);

struct Rank1Extraction {
  Vector x;                  // first column of G below the corner
  double gram_residual = 0;  // ||G[1:,1:] - x x^T||_F
  int rank = 0;
  Vector spectrum;           // eigenvalues of G, descending
};

/// Throws InvalidGram when |G_11 - 1| > 1e-6.
Rank1Extraction extract_rank1(const SymMat& g, double rel_tol = 1e-6);

/// max_i (||u_i|| - |e^T u_i|); 0 for an empty list.
double collinearity_residual(const std::vector<Vector>& vectors, const Vector& e);

/// Collinearity of the Gram factors of G: the columns of its PSD square root,
/// measured against the normalized column of the corner entry.
double gram_collinearity(const SymMat& g);

struct TwoStageValue {
  double phi_value = 0.0;
  Vector argmin_u;
  Vector stage1_argmin_v;
};

/// Closed-form second-stage value ||z - (b0 + xhat) e||^2 with minimizer
/// z - b0 e. Throws ConditionNotMet unless xhat >= -b0 and e^T z >= 0.
TwoStageValue phi_closed_form(const Vector& z, const Vector& e, double b0, double xhat);

/// The same second-stage projection posed as a conic program and solved
/// numerically: min ||u - xhat e||^2 subject to the two linear constraints
/// e^T z >= e^T (u + b0 e) and ||z||^2 <= (u + b0 e)^T z.
double phi_by_conic_solve(const Vector& z, const Vector& e, double b0, double xhat,
                          const conic::SolverOptions& opts = {});

/// Exact bound on c y for y = max(0, x + b0), x in X, c = +1 or -1.
/// Throws ConditionNotMet when xhat < -b0 and InvalidInput when |c| != 1.
double single_neuron_analytic(const Interval& x, double b0, double c);

/// The tightness result that applies to the shape of (net, X). A unit-weight
/// single neuron on a 1-D input is kSingleNeuron, any ball is kEllipsoid and
/// everything else is treated as kRectangle.
TheoremCase select_case(const ReluNetwork& net, const InputSet& x);

struct ConditionReport {
  TheoremCase which = TheoremCase::kSingleNeuron;
  std::vector<AssumptionCheck> flags;
  bool all_hold() const;
  /// Flag value by id, nullopt when absent.
  std::optional<bool> flag(const std::string& id) const;
};

/// Assumptions of the selected case plus its side conditions. The rectangle
/// case accepts a nonsingular diagonal W0 through normalize_diagonal_weight
/// and requires the reduced center to satisfy xhat_j + b0_j >= 0 per
/// coordinate, the hypothesis under which each coordinate reduces to the
/// single-neuron closed form.
ConditionReport check_condition(const ReluNetwork& net, const InputSet& x,
                                const SafetySpec& spec, TheoremCase which, bool cuts);

/// Multipliers of the ellipsoid second-stage problem recovered from a solved
/// DeepSDP dual: nu = 2 nu_sdp / gamma, lambda = 2 lambda_sdp / gamma.
struct SecondStageMultipliers {
  Vector nu;
  Vector lambda;
  double gamma = 0.0;
};

/// Takes the ball multiplier gamma and the neuron multipliers lambda_sdp,
/// nu_sdp of a solved dual. nullopt when gamma vanishes (the ball constraint
/// carries no weight and the scaling is undefined).
std::optional<SecondStageMultipliers> ellipsoid_multipliers(double gamma, const Vector& lambda_sdp,
                                                            const Vector& nu_sdp);

/// Solves the second-stage projection min ||u - xhat||^2 for fixed neuron
/// values v under the value and either-or rows, returning u with the row
/// multipliers. Used when the ball multiplier of the DeepSDP dual vanishes
/// and the dual carries no second-stage information.
struct SecondStageSolution {
  Vector u;
  SecondStageMultipliers multipliers;
  conic::SolveStatus status = conic::SolveStatus::kNumericalFail;
};
SecondStageSolution solve_second_stage(const Vector& v, const ReluNetwork& net, const Ellipsoid& x,
                                       const conic::SolverOptions& opts = {});

struct KktReport {
  double stationarity = 0.0;
  double complementarity_nu = 0.0;
  double complementarity_lambda = 0.0;
  double primal_feasibility = 0.0;
  double dual_feasibility = 0.0;
  double max() const;
};

/// Residuals of the second-stage KKT system for collinear solutions with
/// scalar coordinates u (inputs) and v (neurons) along e.
KktReport ellipsoid_kkt_check(const Vector& u, const Vector& v, const Vector& nu,
                              const Vector& lambda, const ReluNetwork& net, const Ellipsoid& x);

/// Closest point of X to p.
Vector project_to_input(const InputSet& x, const Vector& p);

struct Purification {
  bool accepted = false;
  Vector x0;
  Vector lifted;  // [1; x^0; ...; x^L] of the forward pass at x0
  double value = 0.0;  // 2 c^T f(x0)
};

/// Tries to read a rank-1 optimal solution off G: candidate inputs are the
/// x^0 column of G and the x^0 part of its leading eigenvector, projected onto
/// X. The forward lift z z^T is feasible by construction and is accepted when
/// 2 c^T f(x0) is within tol (1 + |sdp_opt|) of the SDP optimum.
Purification purify(const SymMat& g, const ReluNetwork& net, const InputSet& x, const Vector& c,
                    double sdp_opt, double tol = 1e-6);

struct TightnessReport {
  Vector eigen_spectrum;
  int raw_rank = 0;
  int numeric_rank = 0;  // 1 when purification succeeded, raw_rank otherwise
  Vector extracted_x;
  double gram_residual = 0.0;
  double collinearity = 0.0;
  bool purified = false;
  std::optional<double> oracle_gap;  // |d*_sdp - d*_oracle|, bounds on c^T y
  std::vector<AssumptionCheck> condition_flags;
  Verdict verdict = Verdict::kUnknown;
};

/// GAP_DETECTED: oracle gap above 10 tol, which overrides everything else.
/// CERTIFIED_TIGHT: conditions hold and rank 1. NUMERICALLY_TIGHT: rank 1 or
/// an oracle gap within tol. UNKNOWN otherwise. analyze_tightness passes
/// tol = 1e-6 (1 + |d*|).
Verdict decide_verdict(bool conditions_hold, int rank, std::optional<double> oracle_gap,
                       double tol);

struct TightnessInput {
  const SymMat* gram = nullptr;  // primal G*
  double sdp_opt = 0.0;          // optimum on the 2 c^T y scale
  std::optional<double> oracle_opt;  // same scale
  const ConditionReport* conditions = nullptr;
  double rank_tol = 1e-6;
};

TightnessReport analyze_tightness(const TightnessInput& in, const ReluNetwork& net,
                                  const InputSet& x, const Vector& c);

}  // namespace deepsdp
