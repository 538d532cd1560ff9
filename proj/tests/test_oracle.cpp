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
#include <limits>
#include <random>

#include "deepsdp/errors.hpp"
#include "deepsdp/oracle.hpp"
#include "doctest.h"

using namespace deepsdp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ReluNetwork identity2() {
  return ReluNetwork({{Matrix::Identity(2, 2), vec({0, 0})}, {Matrix::Identity(2, 2), vec({0, 0})}});
}

ReluNetwork random_net(std::mt19937_64& rng, std::vector<int> widths) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Layer> layers;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    Matrix w(widths[k + 1], widths[k]);
    Vector b(widths[k + 1]);
    for (auto& v : w.reshaped()) v = u(rng);
    for (auto& v : b) v = u(rng);
    layers.push_back({w, b});
  }
  return ReluNetwork(std::move(layers));
}

// Output of the affine model that a pattern fixes, evaluated at x0.
Vector pattern_output(const ReluNetwork& net, const std::vector<bool>& pattern, const Vector& x0) {
  Vector cur = x0;
  std::size_t bit = 0;
  for (int k = 0; k < net.depth(); ++k) {
    Vector pre = net.layer(k).w * cur + net.layer(k).b;
    for (Eigen::Index i = 0; i < pre.size(); ++i, ++bit)
      if (!pattern[bit]) pre(i) = 0.0;
    cur = pre;
  }
  return net.layer(net.depth()).w * cur + net.layer(net.depth()).b;
}

}  // namespace

TEST_CASE("single neuron interval") {
  const ReluNetwork net({{Matrix::Ones(1, 1), vec({0})}, {Matrix::Ones(1, 1), vec({0})}});
  const auto r = exact_minimize(net, Interval{-1, 3}, vec({1}));
  CHECK(r.opt_value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.status == OracleStatus::kExact);
  CHECK(r.pattern.size() == 1);
  CHECK(r.argmin_x0(0) <= 1e-7);

  const auto up = exact_minimize(net, Interval{-1, 3}, vec({-1}));
  CHECK(up.opt_value == doctest::Approx(-6.0));
}

TEST_CASE("ball around (1,1)") {
  const auto r = exact_minimize(identity2(), Ellipsoid{vec({1, 1}), 1.0}, vec({1, 0}));
  CHECK(std::abs(r.opt_value) <= 1e-7);
  CHECK(r.argmin_x0(0) == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(r.argmin_x0(1) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("rectangle centered at (1,-1)") {
  const auto r =
      exact_minimize(identity2(), Rectangle{vec({1, -1}), vec({0.5, 0.5})}, vec({1, 1}));
  CHECK(r.opt_value == doctest::Approx(1.0));
  CHECK(r.subproblems_solved + r.infeasible_patterns >= 4);
}

TEST_CASE("degenerate interval evaluates the point") {
  const ReluNetwork net({{Matrix::Ones(1, 1), vec({0.5})}, {Matrix::Ones(1, 1), vec({0})}});
  const Interval x{2, 2};
  const auto r = exact_minimize(net, x, vec({1}));
  CHECK(r.opt_value == 5.0);
  CHECK(sample_bound(net, x, vec({1}), 50, 3) == 5.0);
}

TEST_CASE("sample bound is never below the exact value") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 12; ++t) {
    const auto net = random_net(rng, {2, 3, 2});
    const Vector c = vec({1, -0.5});
    const InputSet x = t % 2 == 0 ? InputSet{Rectangle{vec({0.1, -0.2}), vec({0.6, 0.4})}}
                                  : InputSet{Ellipsoid{vec({0.1, -0.2}), 0.6}};
    const auto exact = exact_minimize(net, x, c);
    const double sampled = sample_bound(net, x, c, 2000, 100 + t);
    CHECK(sampled >= exact.opt_value - 1e-8);
    CHECK(sampled - exact.opt_value <= 0.1);
    CHECK(2.0 * c.dot(forward(net, exact.argmin_x0)) ==
          doctest::Approx(exact.opt_value).epsilon(1e-12));
    CHECK(contains(x, exact.argmin_x0, 1e-9));
  }
}

TEST_CASE("pattern reproduces the forward output at the minimizer") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 8; ++t) {
    const auto net = random_net(rng, {2, 2, 2, 1});
    const Rectangle x{vec({0, 0}), vec({1, 1})};
    const auto r = exact_minimize(net, x, vec({1}));
    CHECK(r.pattern.size() == 4);
    const Vector model = pattern_output(net, r.pattern, r.argmin_x0);
    CHECK((model - forward(net, r.argmin_x0)).norm() <= 1e-7);
  }
}

TEST_CASE("sample bound is deterministic and infinite without samples") {
  const auto net = identity2();
  const Ellipsoid x{vec({0, 0}), 1.0};
  CHECK(sample_bound(net, x, vec({1, 1}), 300, 9) == sample_bound(net, x, vec({1, 1}), 300, 9));
  CHECK(sample_bound(net, x, vec({1, 1}), 0, 9) == std::numeric_limits<double>::infinity());
}

TEST_CASE("cap marks the result") {
  std::mt19937_64 rng(2);
  const auto net = random_net(rng, {1, 4, 1});
  OracleOptions opts;
  opts.cap = 4;
  const auto r = exact_minimize(net, Interval{-1, 1}, vec({1}), opts);
  CHECK(r.status == OracleStatus::kCapped);
  CHECK(to_string(r.status) == "CAPPED");
  CHECK(exact_minimize(net, Interval{-1, 1}, vec({1})).status == OracleStatus::kExact);
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_THROWS_AS(exact_minimize(identity2(), Interval{0, 1}, vec({1, 1})), InvalidInput);
  CHECK_THROWS_AS(exact_minimize(identity2(), Ellipsoid{vec({0, 0}), 1}, vec({1})), InvalidInput);
}
