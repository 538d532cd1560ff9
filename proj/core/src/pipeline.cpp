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

#include "deepsdp/pipeline.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "deepsdp/errors.hpp"

namespace deepsdp {

namespace {

constexpr double kSoundnessSlack = 1e-6;

double certificate_form(const SymMat& s, const Vector& x0, const Vector& y) {
  Vector z(1 + x0.size() + y.size());
  z << 1.0, x0, y;
  return z.dot(s.matrix() * z);
}

void require_optimal(const conic::ConicSolution& sol, const char* what, int index) {
  if (sol.status == conic::SolveStatus::kOptimal) return;
  std::ostringstream os;
  os << what << " solve for direction " << index << " ended with " << conic::to_string(sol.status)
     << " after " << sol.iterations << " iterations (largest residual " << sol.residuals.max() << ")";
  throw SolverFailure(os.str());
}

}  // namespace

RelaxationSolve solve_relaxation(const ReluNetwork& net, const InputSet& x, const Vector& c,
                                 const FormulationOptions& form, const conic::SolverOptions& solver) {
  const auto norm = normalize_input(net, x);
  RelaxationSolve r;
  r.layout = dual_layout(norm.net, form);
  r.dual = conic::solve(build_deepsdp_dual(norm.net, norm.input, c, form), solver);
  r.primal = conic::solve(build_primal_relaxation(norm.net, norm.input, c, form), solver);
  r.dual_d = -r.dual.primal_obj / 2.0;
  r.primal_d = r.primal.primal_obj / 2.0;
  r.gram = denormalize_gram(SymMat(r.primal.primal[0]), norm);

  // Every generator of a ball or interval scales with the one radius; box
  // generator j scales with radius j.
  r.input_multipliers = r.dual.primal.at(r.layout.gamma).col(0);
  for (Eigen::Index j = 0; j < r.input_multipliers.size(); ++j) {
    const double s = std::holds_alternative<Rectangle>(x) ? norm.scale(j) : norm.scale(0);
    r.input_multipliers(j) /= s * s;
  }
  return r;
}

std::optional<SecondStageMultipliers> ellipsoid_multipliers(const RelaxationSolve& sol) {
  if (sol.input_multipliers.size() != 1)
    throw InvalidInput("ball inputs carry exactly one input multiplier");
  return ellipsoid_multipliers(sol.input_multipliers(0), sol.dual.primal.at(sol.layout.lambda).col(0),
                               sol.dual.primal.at(sol.layout.nu).col(0));
}

DirectionResult verify_direction(const ReluNetwork& net, const InputSet& x, const Vector& c,
                                 int index, const VerifyOptions& opts) {
  DirectionResult r;
  r.index = index;
  r.c = c;

  r.solve = solve_relaxation(net, x, c, opts.formulation, opts.solver);
  require_optimal(r.solve.dual, "dual", index);
  require_optimal(r.solve.primal, "primal", index);

  r.dual_obj = r.solve.dual_d;
  r.primal_obj = r.solve.primal_d;
  r.d_star = r.dual_obj;
  r.gap = std::abs(r.primal_obj - r.dual_obj);
  r.primal_iterations = r.solve.primal.iterations;
  r.dual_iterations = r.solve.dual.iterations;

  SymMat s = objective_matrix(c, net.input_dim());
  s.set(0, 0, -2.0 * r.d_star);
  std::mt19937_64 rng(opts.seed);
  r.min_certificate_form = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.samples; ++k) {
    const Vector x0 = sample_input(x, rng);
    r.min_certificate_form = std::min(r.min_certificate_form, certificate_form(s, x0, forward(net, x0)));
  }
  r.sound = !(r.min_certificate_form < -kSoundnessSlack);
  return r;
}

SafetySpec safety_polytope(const std::vector<DirectionResult>& results) {
  SafetySpec spec;
  for (const auto& r : results) {
    spec.directions.push_back(r.c);
    spec.offsets.push_back(r.d_star);
  }
  return spec;
}

Comparison compare_direction(const ReluNetwork& net, const InputSet& x, const Vector& c,
                             int index, const VerifyOptions& opts,
                             const OracleOptions& oracle_opts) {
  Comparison out;
  out.sdp = verify_direction(net, x, c, index, opts);
  out.oracle = exact_minimize(net, x, c, oracle_opts);

  const SafetySpec spec{{c}, {out.sdp.d_star}};
  out.conditions = check_condition(net, x, spec, select_case(net, x), opts.formulation.cuts);

  TightnessInput in;
  in.gram = &out.sdp.solve.gram;
  in.sdp_opt = 2.0 * out.sdp.d_star;
  in.oracle_opt = out.oracle.opt_value;
  in.conditions = &out.conditions;
  in.rank_tol = opts.rank_tol;
  out.tightness = analyze_tightness(in, net, x, c);

  const auto* ball = std::get_if<Ellipsoid>(&x);
  if (ball != nullptr && out.conditions.which == TheoremCase::kEllipsoid &&
      out.conditions.all_hold() && out.tightness.numeric_rank == 1) {
    const int n0 = net.input_dim();
    const Vector u = out.tightness.extracted_x.head(n0);
    const Vector v = out.tightness.extracted_x.segment(n0, net.num_neurons());
    if (const auto mult = ellipsoid_multipliers(out.sdp.solve)) {
      out.kkt = ellipsoid_kkt_check(u, v, mult->nu, mult->lambda, net, *ball);
    } else {
      const auto stage = solve_second_stage(v, net, *ball, opts.solver);
      if (stage.status == conic::SolveStatus::kOptimal)
        out.kkt = ellipsoid_kkt_check(stage.u, v, stage.multipliers.nu, stage.multipliers.lambda,
                                      net, *ball);
    }
  }
  return out;
}

}  // namespace deepsdp
