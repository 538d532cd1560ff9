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
#include <vector>

#include "deepsdp/errors.hpp"
#include "deepsdp/pipeline.hpp"
#include "doctest.h"

using namespace deepsdp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ReluNetwork single_neuron() {
  return ReluNetwork({{Matrix::Constant(1, 1, 1.0), vec({0})}, {Matrix::Constant(1, 1, 1.0), vec({0})}});
}

ReluNetwork identity2() {
  return ReluNetwork({{Matrix::Identity(2, 2), vec({0, 0})}, {Matrix::Identity(2, 2), vec({0, 0})}});
}

// Lower and upper ends of the output range along each axis, read off the
// offsets of the directions +e_k and -e_k.
std::vector<std::pair<double, double>> axis_ranges(const ReluNetwork& net, const InputSet& x) {
  const int n = net.output_dim();
  std::vector<std::pair<double, double>> out;
  VerifyOptions opts;
  opts.samples = 2000;
  for (int k = 0; k < n; ++k) {
    const auto up = verify_direction(net, x, Vector::Unit(n, k), 2 * k, opts);
    const auto down = verify_direction(net, x, -Vector::Unit(n, k), 2 * k + 1, opts);
    CHECK(up.sound);
    CHECK(down.sound);
    out.emplace_back(up.d_star, -down.d_star);
  }
  return out;
}

}  // namespace

TEST_CASE("single neuron on [-1, 3] gives the output range [0, 3]") {
  const auto r = axis_ranges(single_neuron(), Interval{-1.0, 3.0});
  CHECK(r[0].first == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(r[0].second == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("identity rectangle: exact on the first axis, loose above on the second") {
  // Pre-activations lie in [0.5, 1.5] x [-1.5, -0.5], so the output range is
  // [0.5, 1.5] x [0, 0]. The second center sits below -b0, and the relaxation
  // maximum of y over x in [-1.5, -0.5] is max_x (x + sqrt(-2x - 0.75)) / 2,
  // reached at x = -7/8 with value 1/16.
  const Rectangle box{vec({1.0, -1.0}), vec({0.5, 0.5})};
  const auto r = axis_ranges(identity2(), box);
  CHECK(r[0].first == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r[0].second == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(std::abs(r[1].first) < 1e-6);
  CHECK(r[1].second == doctest::Approx(1.0 / 16.0).epsilon(1e-6));

  VerifyOptions opts;
  opts.samples = 500;
  const auto cmp = compare_direction(identity2(), box, vec({0, -1}), 0, opts);
  CHECK(cmp.oracle.opt_value == doctest::Approx(0.0));
  CHECK_FALSE(cmp.conditions.all_hold());
  CHECK(cmp.tightness.verdict == Verdict::kGapDetected);
}

TEST_CASE("primal and dual bounds agree and the certificate form is nonnegative") {
  VerifyOptions opts;
  const auto r = verify_direction(identity2(), Ellipsoid{vec({0.3, -0.2}), 0.7}, vec({0.6, 0.8}), 0, opts);
  CHECK(r.gap <= 1e-6 * (1.0 + std::abs(r.primal_obj)));
  CHECK(r.min_certificate_form >= -1e-6);
  CHECK(r.sound);
  CHECK(r.primal_iterations > 0);
  CHECK(r.dual_iterations > 0);
}

TEST_CASE("safety polytope collects one half-space per direction") {
  VerifyOptions opts;
  opts.samples = 100;
  const Interval x{-1.0, 3.0};
  std::vector<DirectionResult> results;
  results.push_back(verify_direction(single_neuron(), x, vec({1.0}), 0, opts));
  results.push_back(verify_direction(single_neuron(), x, vec({-1.0}), 1, opts));
  const auto spec = safety_polytope(results);
  REQUIRE(spec.directions.size() == 2);
  CHECK(spec.offsets[0] == doctest::Approx(results[0].d_star));
  CHECK(spec.directions[1](0) == -1.0);
  CHECK(safety_polytope({}).directions.empty());
}

TEST_CASE("an iteration limit of one surfaces as SolverFailure") {
  VerifyOptions opts;
  opts.solver.max_iter = 1;
  CHECK_THROWS_AS(verify_direction(identity2(), Ellipsoid{vec({0, 0}), 1.0}, vec({1, 0}), 0, opts),
                  SolverFailure);
}

TEST_CASE("normalized solve matches the bound in original coordinates") {
  // A thin interval: the bound is the ReLU of the right end.
  const auto r = solve_relaxation(single_neuron(), Interval{2.0, 2.0 + 1e-4}, vec({-1.0}), {}, {});
  REQUIRE(r.primal_ok());
  REQUIRE(r.dual_ok());
  CHECK(r.dual_d == doctest::Approx(-(2.0 + 1e-4)).epsilon(1e-7));
  CHECK(r.gram.matrix()(0, 1) == doctest::Approx(2.0 + 1e-4).epsilon(1e-6));
}

TEST_CASE("compare joins the bound, the oracle and the verdict") {
  VerifyOptions opts;
  opts.samples = 500;
  const auto cmp = compare_direction(single_neuron(), Interval{-1.0, 3.0}, vec({-1.0}), 0, opts);
  CHECK(cmp.oracle.status == OracleStatus::kExact);
  CHECK(cmp.oracle.opt_value == doctest::Approx(2.0 * cmp.sdp.d_star).epsilon(1e-6));
  CHECK(cmp.tightness.verdict == Verdict::kCertifiedTight);
  CHECK_FALSE(cmp.kkt.has_value());
}

TEST_CASE("compare checks KKT residuals on a certified ball instance") {
  VerifyOptions opts;
  opts.samples = 500;
  opts.solver.tol = 1e-9;
  const ReluNetwork net({{Matrix::Identity(2, 2), vec({1.5, 1.2})},
                         {Matrix::Identity(2, 2), vec({0, 0})}});
  const auto cmp = compare_direction(net, Ellipsoid{vec({0, 0}), 1.0}, vec({0.6, 0.8}), 0, opts);
  CHECK(cmp.tightness.verdict == Verdict::kCertifiedTight);
  REQUIRE(cmp.kkt.has_value());
  CHECK(cmp.kkt->max() <= 1e-5);
}
