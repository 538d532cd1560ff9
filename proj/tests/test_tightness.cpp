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

#include <cmath>
#include <random>

#include "deepsdp/conic_solver.hpp"
#include "deepsdp/errors.hpp"
#include "deepsdp/formulation.hpp"
#include "deepsdp/oracle.hpp"
#include "deepsdp/tightness.hpp"
#include "doctest.h"

using namespace deepsdp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ReluNetwork single_neuron(double b0) {
  return ReluNetwork({{Matrix::Ones(1, 1), vec({b0})}, {Matrix::Ones(1, 1), vec({0})}});
}

SymMat outer1(const Vector& x) {
  Vector z(x.size() + 1);
  z << 1.0, x;
  return SymMat(Matrix(z * z.transpose()));
}

SafetySpec spec_of(const Vector& c) { return {{c}, {0.0}}; }

}  // namespace

TEST_CASE("extract_rank1 on an exact outer product") {
  const auto r = extract_rank1(outer1(vec({2, -1})));
  CHECK((r.x - vec({2, -1})).norm() == doctest::Approx(0.0));
  CHECK(r.gram_residual == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.rank == 1);
}

TEST_CASE("extract_rank1 on the identity") {
  const auto r = extract_rank1(SymMat(Matrix(Matrix::Identity(3, 3))));
  CHECK(r.rank == 3);
  CHECK(r.gram_residual == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("extract_rank1 rejects a corner away from 1") {
  CHECK_THROWS_AS(extract_rank1(SymMat(Matrix(2.0 * Matrix::Identity(2, 2)))), InvalidGram);
}

TEST_CASE("collinearity_residual examples") {
  const Vector e = vec({1, 0});
  CHECK(collinearity_residual({vec({3, 0}), vec({-2, 0})}, e) == doctest::Approx(0.0));
  CHECK(collinearity_residual({vec({1, 1})}, e) == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK(collinearity_residual({}, e) == 0.0);
}

TEST_CASE("gram collinearity is zero for rank one and positive otherwise") {
  CHECK(gram_collinearity(outer1(vec({0.5, -3, 2}))) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(gram_collinearity(SymMat(Matrix(Matrix::Identity(3, 3)))) > 0.5);
}

TEST_CASE("phi closed form examples") {
  const Vector e = vec({1, 0});
  const auto a = phi_closed_form(vec({2, 0}), e, 0.0, 1.0);
  CHECK(a.phi_value == doctest::Approx(1.0));
  CHECK((a.argmin_u - vec({2, 0})).norm() == doctest::Approx(0.0));

  CHECK(phi_closed_form(vec({1.5, 0}), e, 0.5, 1.0).phi_value == doctest::Approx(0.0));

  const auto b = phi_closed_form(vec({0, 1}), e, 0.0, 1.0);
  CHECK(b.phi_value == doctest::Approx(2.0));
  CHECK(phi_by_conic_solve(vec({0, 1}), e, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("phi closed form refuses a center below the bias") {
  CHECK_THROWS_AS(phi_closed_form(vec({1, 0}), vec({1, 0}), 0.0, -1.0), ConditionNotMet);
  CHECK_THROWS_AS(phi_closed_form(vec({-1, 0}), vec({1, 0}), 0.0, 1.0), ConditionNotMet);
}

TEST_CASE("phi closed form agrees with the conic solve on random instances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  std::uniform_int_distribution<int> dim(1, 3);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int p = dim(rng);
    const Vector e = Vector::Unit(p, 0);
    Vector z(p);
    for (auto& v : z) v = u(rng);
    z(0) = std::abs(z(0));
    const double b0 = u(rng);
    const double xhat = -b0 + pos(rng);
    const double closed = phi_closed_form(z, e, b0, xhat).phi_value;
    const double solved = phi_by_conic_solve(z, e, b0, xhat);
    worst = std::max(worst, std::abs(closed - solved));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("single neuron analytic bound") {
  CHECK(single_neuron_analytic({-1, 3}, 0.0, 1.0) == 0.0);
  CHECK(single_neuron_analytic({1, 2}, 0.0, 1.0) == 1.0);
  CHECK(single_neuron_analytic({-1, 3}, 0.0, -1.0) == -3.0);
  CHECK_THROWS_AS(single_neuron_analytic({-3, 1}, 0.0, 1.0), ConditionNotMet);
  CHECK_THROWS_AS(single_neuron_analytic({-1, 3}, 0.0, 2.0), InvalidInput);
}

TEST_CASE("single neuron analytic matches the oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 40; ++t) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    const double b0 = std::max(-0.5 * (lo + hi), u(rng));
    const double c = t % 2 == 0 ? 1.0 : -1.0;
    const auto net = single_neuron(b0);
    const auto oracle = exact_minimize(net, Interval{lo, hi}, vec({c}));
    CHECK(single_neuron_analytic({lo, hi}, b0, c) == doctest::Approx(oracle.opt_value / 2.0));
  }
}

TEST_CASE("single neuron condition") {
  const auto net = single_neuron(0.0);
  const auto ok = check_condition(net, Interval{-1, 3}, spec_of(vec({1})),
                                  TheoremCase::kSingleNeuron, false);
  CHECK(ok.all_hold());
  CHECK(ok.flag("center_above_negative_bias") == true);

  const auto bad = check_condition(net, Interval{-3, 1}, spec_of(vec({1})),
                                   TheoremCase::kSingleNeuron, false);
  CHECK_FALSE(bad.all_hold());
  CHECK(bad.flag("center_above_negative_bias") == false);
  CHECK_FALSE(bad.flag("no_such_flag").has_value());
}

TEST_CASE("select_case picks the shape") {
  CHECK(select_case(single_neuron(0), Interval{-1, 1}) == TheoremCase::kSingleNeuron);
  const ReluNetwork two({{Matrix::Identity(2, 2), vec({0, 0})}, {Matrix::Identity(2, 2), vec({0, 0})}});
  CHECK(select_case(two, Ellipsoid{vec({0, 0}), 1.0}) == TheoremCase::kEllipsoid);
  CHECK(select_case(two, Rectangle{vec({0, 0}), vec({1, 1})}) == TheoremCase::kRectangle);
}

TEST_CASE("ellipsoid conditions hold for identity output layers without cuts") {
  const ReluNetwork net({{(Matrix(2, 2) << 0.5, -0.3, 0.2, 0.9).finished(), vec({0.1, -0.4})},
                         {Matrix::Identity(2, 2), vec({0, 0})}});
  const Ellipsoid x{vec({0.3, 0.2}), 0.7};
  CHECK(check_condition(net, x, spec_of(vec({1, 0})), TheoremCase::kEllipsoid, false).all_hold());
  CHECK_FALSE(
      check_condition(net, x, spec_of(vec({1, 0})), TheoremCase::kEllipsoid, true).all_hold());
}

TEST_CASE("rectangle conditions reduce a diagonal first layer") {
  const ReluNetwork diag({{(Matrix(2, 2) << 2.0, 0.0, 0.0, -0.5).finished(), vec({0.5, 0.2})},
                          {Matrix::Identity(2, 2), vec({0, 0})}});
  const Rectangle x{vec({1, -1}), vec({0.5, 0.5})};
  const auto r = check_condition(diag, x, spec_of(vec({1, 1})), TheoremCase::kRectangle, false);
  CHECK(r.flag("identity_first_layer") == true);
  CHECK(r.flag("center_above_negative_bias") == true);
  CHECK(r.all_hold());

  const ReluNetwork dense({{(Matrix(2, 2) << 1.0, 0.4, -0.3, 1.0).finished(), vec({0, 0})},
                           {Matrix::Identity(2, 2), vec({0, 0})}});
  const auto d = check_condition(dense, x, spec_of(vec({1, 1})), TheoremCase::kRectangle, false);
  CHECK(d.flag("identity_first_layer") == false);
  CHECK_FALSE(d.all_hold());
}

TEST_CASE("kkt with zero multipliers is stationary exactly at the center") {
  const ReluNetwork net({{Matrix::Identity(2, 2), vec({0, 0})}, {Matrix::Identity(2, 2), vec({0, 0})}});
  const Ellipsoid x{vec({1, 2}), 1.0};
  const Vector zero = Vector::Zero(2);
  const Vector u = x.center;
  const Vector v = u.cwiseMax(0.0);
  CHECK(ellipsoid_kkt_check(u, v, zero, zero, net, x).stationarity == doctest::Approx(0.0));

  const Vector off = vec({1.5, 2});
  const auto r = ellipsoid_kkt_check(off, off.cwiseMax(0.0), zero, zero, net, x);
  CHECK(r.stationarity > 0.4);
  CHECK(r.primal_feasibility == doctest::Approx(0.0));
}

TEST_CASE("project_to_input lands in X") {
  CHECK(project_to_input(Interval{-1, 3}, vec({5}))(0) == 3.0);
  const Vector p = project_to_input(Ellipsoid{vec({0, 0}), 2.0}, vec({3, 4}));
  CHECK(p.norm() == doctest::Approx(2.0));
  CHECK((project_to_input(Rectangle{vec({0, 0}), vec({1, 1})}, vec({2, -0.5})) - vec({1, -0.5}))
            .norm() == 0.0);
}

TEST_CASE("decide_verdict ladder") {
  CHECK(decide_verdict(true, 1, 0.0, 1e-6) == Verdict::kCertifiedTight);
  CHECK(decide_verdict(true, 2, 0.0, 1e-6) == Verdict::kNumericallyTight);
  CHECK(decide_verdict(false, 1, std::nullopt, 1e-6) == Verdict::kNumericallyTight);
  CHECK(decide_verdict(false, 2, std::nullopt, 1e-6) == Verdict::kUnknown);
  CHECK(decide_verdict(false, 2, 5e-6, 1e-6) == Verdict::kUnknown);
  CHECK(decide_verdict(true, 1, 1e-4, 1e-6) == Verdict::kGapDetected);
  CHECK(to_string(Verdict::kGapDetected) == "GAP_DETECTED");
}

TEST_CASE("solved single neuron Gram is rank one and certified") {
  const auto net = single_neuron(0.0);
  const Interval x{-1, 3};
  for (double c : {1.0, -1.0}) {
    const auto sol = conic::solve(build_primal_relaxation(net, x, vec({c})));
    REQUIRE(sol.status == conic::SolveStatus::kOptimal);
    const SymMat g(sol.primal[0]);
    // c = +1 is minimized by every x in [-1, 0]; the interior-point solution
    // sits inside that face and needs purification to reach rank 1.
    const auto ext = extract_rank1(g);
    if (c < 0) {
      CHECK(ext.rank == 1);
      CHECK(ext.gram_residual <= 1e-6);
    }

    const auto cond = check_condition(net, x, spec_of(vec({c})), TheoremCase::kSingleNeuron, false);
    const auto oracle = exact_minimize(net, x, vec({c}));
    TightnessInput in;
    in.gram = &g;
    in.sdp_opt = sol.primal_obj;
    in.oracle_opt = oracle.opt_value;
    in.conditions = &cond;
    const auto rep = analyze_tightness(in, net, x, vec({c}));
    CHECK(rep.numeric_rank == 1);
    CHECK(rep.gram_residual <= 1e-6);
    CHECK(rep.purified == (c > 0));
    CHECK(rep.verdict == Verdict::kCertifiedTight);
    CHECK(*rep.oracle_gap <= 1e-6);
  }
}

TEST_CASE("ellipsoid multipliers satisfy the KKT system at a tight optimum") {
  const ReluNetwork net({{(Matrix(2, 2) << 0.8, -0.2, 0.3, 0.6).finished(), vec({1.5, 1.2})},
                         {Matrix::Identity(2, 2), vec({0, 0})}});
  const Ellipsoid x{vec({0.4, 0.1}), 0.8};
  const Vector c = vec({0.6, 0.8});
  conic::SolverOptions opts;
  opts.tol = 1e-9;
  const auto dual = conic::solve(build_deepsdp_dual(net, x, c), opts);
  REQUIRE(dual.status == conic::SolveStatus::kOptimal);
  const auto layout = dual_layout(net, {});
  const auto mult = ellipsoid_multipliers(dual.primal[layout.gamma](0), dual.primal[layout.lambda].col(0),
                                          dual.primal[layout.nu].col(0));
  REQUIRE(mult.has_value());
  const auto oracle = exact_minimize(net, x, c);
  CHECK(-dual.primal_obj == doctest::Approx(oracle.opt_value).epsilon(1e-6));
  const auto primal = conic::solve(build_primal_relaxation(net, x, c), opts);
  REQUIRE(primal.status == conic::SolveStatus::kOptimal);
  const auto ext = extract_rank1(SymMat(primal.primal[0]));
  REQUIRE(ext.rank == 1);
  const Vector u = ext.x.head(2);
  const Vector v = ext.x.tail(2);
  CHECK(ellipsoid_kkt_check(u, v, mult->nu, mult->lambda, net, x).max() <= 1e-5);
}

TEST_CASE("vanishing ball multiplier yields no scaled multipliers") {
  CHECK_FALSE(ellipsoid_multipliers(0.0, vec({1}), vec({1})).has_value());
  const auto m = ellipsoid_multipliers(0.5, vec({1}), vec({2}));
  REQUIRE(m.has_value());
  CHECK(m->lambda(0) == 4.0);
  CHECK(m->nu(0) == 8.0);
}

TEST_CASE("second stage projection satisfies its own KKT system") {
  const ReluNetwork net({{(Matrix(2, 2) << 0.8, -0.2, 0.3, 0.6).finished(), vec({0.2, -0.4})},
                         {Matrix::Identity(2, 2), vec({0, 0})}});
  const Ellipsoid x{vec({0.4, 0.1}), 0.8};
  // v from an input away from the center: the projection must move toward it.
  const Vector v = forward_trace(net, vec({0.9, -0.3})).stacked_neurons();
  conic::SolverOptions opts;
  opts.tol = 1e-9;
  const auto st = solve_second_stage(v, net, x, opts);
  REQUIRE(st.status == conic::SolveStatus::kOptimal);
  const auto rep = ellipsoid_kkt_check(st.u, v, st.multipliers.nu, st.multipliers.lambda, net, x);
  CHECK(rep.stationarity <= 1e-5);
  CHECK(rep.dual_feasibility <= 1e-8);
  CHECK(rep.complementarity_nu <= 1e-6);
  CHECK(rep.complementarity_lambda <= 1e-6);
}
