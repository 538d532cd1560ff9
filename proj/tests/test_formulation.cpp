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
#include <set>

#include "deepsdp/conic_solver.hpp"
#include "deepsdp/errors.hpp"
#include "deepsdp/formulation.hpp"
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

double quad(const SymMat& a, const Vector& z) { return z.dot(a.matrix() * z); }

double primal_bound(const ReluNetwork& net, const InputSet& x, const Vector& c,
                    FormulationOptions opts = {}) {
  const auto sol = conic::solve(build_primal_relaxation(net, x, c, opts));
  REQUIRE(sol.status == conic::SolveStatus::kOptimal);
  return sol.primal_obj / 2.0;
}

double dual_bound(const ReluNetwork& net, const InputSet& x, const Vector& c,
                  FormulationOptions opts = {}) {
  const auto sol = conic::solve(build_deepsdp_dual(net, x, c, opts));
  REQUIRE(sol.status == conic::SolveStatus::kOptimal);
  return -sol.primal_obj / 2.0;
}

}  // namespace

TEST_CASE("lifting maps of a two-layer network") {
  ReluNetwork net({{Matrix::Ones(2, 1), vec({1, 2})},
                   {Matrix::Ones(3, 2), vec({0, 0, 0})},
                   {Matrix::Ones(1, 3), vec({5})}});
  const auto m = lifting_maps(net);
  CHECK(m.dim() == 1 + 1 + 5);
  CHECK(m.w_bar.rows() == 5);
  CHECK(m.w_bar.cols() == 6);
  CHECK(m.w_bar.rightCols(3).isZero());
  CHECK(m.e_bar.leftCols(1).isZero());
  CHECK(m.e_bar.rightCols(5) == Matrix::Identity(5, 5));
  CHECK(m.b_bar == vec({1, 2, 0, 0, 0}));
  CHECK(m.e_out.rows() == 3);
  CHECK(m.e_out(2, 0) == 5.0);
}

TEST_CASE("lift_in pads with zeros and lift_out is the identity for an identity last layer") {
  const ReluNetwork net({{Matrix::Identity(2, 2), vec({0.5, -1})},
                         {Matrix::Identity(2, 2), vec({0, 0})}});
  const auto maps = lifting_maps(net);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix p(3, 3);
  for (auto& v : p.reshaped()) v = u(rng);
  const SymMat lp = lift_in(SymMat(p), maps);
  CHECK(lp.dim() == 5);
  CHECK(lp.matrix().topLeftCorner(3, 3) == SymMat(p).matrix());
  CHECK(lp.matrix().rightCols(2).isZero());

  Matrix s(5, 5);
  for (auto& v : s.reshaped()) v = u(rng);
  const SymMat ls = lift_out(SymMat(s), maps);
  CHECK(ls.matrix() == SymMat(s).matrix());

  const SymMat lm = lift_mid(SymMat(s), maps);
  CHECK(lm.matrix() == lm.matrix().transpose());

  CHECK_THROWS_AS(lift_in(SymMat(4), maps), InvalidInput);
  CHECK_THROWS_AS(lift_mid(SymMat(4), maps), InvalidInput);
  CHECK_THROWS_AS(lift_out(SymMat(4), maps), InvalidInput);
}

TEST_CASE("relu constraint counts and tags") {
  std::mt19937_64 rng(1);
  CHECK(relu_constraints(single_neuron(0)).size() == 3);
  const auto net = random_net(rng, {2, 3, 2, 1});
  const auto cons = relu_constraints(net);
  CHECK(cons.size() == 15);
  CHECK(cons[0].sense == Sense::kEq);
  CHECK(cons[1].sense == Sense::kLe);
  CHECK(cons[2].sense == Sense::kLe);
  std::set<std::string> tags;
  for (const auto& k : cons) tags.insert(k.tag);
  for (const auto& k : repeated_nonlinearity_cuts(net)) tags.insert(k.tag);
  CHECK(tags.size() == 15 + 10);
}

TEST_CASE("single neuron complementarity matrix") {
  const auto cons = relu_constraints(single_neuron(0));
  Matrix expected(3, 3);
  expected << 0, 0, 0, 0, 0, -1, 0, -1, 2;
  CHECK(cons[0].matrix.matrix() == expected);

  const auto shifted = relu_constraints(single_neuron(0.5));
  Matrix with_bias(3, 3);
  with_bias << 0, 0, -0.5, 0, 0, -1, -0.5, -1, 2;
  CHECK(shifted[0].matrix.matrix() == with_bias);
}

TEST_CASE("single-layer relu constraints match the explicit block forms") {
  std::mt19937_64 rng(5);
  const auto net = random_net(rng, {3, 2, 2});
  const Matrix& w = net.layer(0).w;
  const Vector& b = net.layer(0).b;
  const auto cons = relu_constraints(net);
  for (int i = 0; i < 2; ++i) {
    const Vector ei = Vector::Unit(2, i);
    Matrix compl_ = Matrix::Zero(6, 6);
    compl_.block(0, 4, 1, 2) = -b(i) * ei.transpose();
    compl_.block(4, 0, 2, 1) = -b(i) * ei;
    compl_.block(1, 4, 3, 2) = -w.transpose() * ei * ei.transpose();
    compl_.block(4, 1, 2, 3) = -ei * ei.transpose() * w;
    compl_.block(4, 4, 2, 2) = 2.0 * ei * ei.transpose();
    CHECK((cons[3 * i].matrix.matrix() - compl_).norm() <= 1e-15);

    Matrix above = Matrix::Zero(6, 6);
    above(0, 0) = 2.0 * b(i);
    above.block(0, 1, 1, 3) = ei.transpose() * w;
    above.block(1, 0, 3, 1) = w.transpose() * ei;
    above.block(0, 4, 1, 2) = -ei.transpose();
    above.block(4, 0, 2, 1) = -ei;
    CHECK((cons[3 * i + 1].matrix.matrix() - above).norm() <= 1e-15);
  }
}

TEST_CASE("input generators") {
  const auto iv = input_generators(Interval{-1, 3}, 1);
  REQUIRE(iv.size() == 1);
  Matrix expected(2, 2);
  expected << -6, -2, -2, 2;
  CHECK(iv[0].matrix() == expected);

  const auto ball = input_generators(Ellipsoid{vec({0, 0}), 1.0}, 2);
  REQUIRE(ball.size() == 1);
  CHECK(ball[0].matrix() == Vector(vec({-1, 1, 1})).asDiagonal().toDenseMatrix());

  CHECK(input_generators(Rectangle{vec({0, 1, 2}), vec({1, 1, 1})}, 3).size() == 3);
  CHECK_THROWS_AS(input_generators(Interval{0, 1}, 2), InvalidInput);
}

TEST_CASE("generators are nonpositive on sampled inputs") {
  std::mt19937_64 rng(9);
  const std::vector<InputSet> sets = {Interval{-1, 3}, Rectangle{vec({0.5, -2}), vec({1, 0.25})},
                                      Ellipsoid{vec({1, -1, 0.5}), 0.8}};
  for (const auto& x : sets) {
    const auto gens = input_generators(x, input_dim(x));
    for (int s = 0; s < 1000; ++s) {
      const Vector p = sample_input(x, rng);
      Vector z(1 + p.size());
      z << 1.0, p;
      for (const auto& g : gens) CHECK(quad(g, z) <= 1e-12);
    }
  }
}

TEST_CASE("cut counts") {
  std::mt19937_64 rng(2);
  CHECK(repeated_nonlinearity_cuts(single_neuron(0)).empty());
  CHECK(repeated_nonlinearity_cuts(random_net(rng, {2, 3, 1})).size() == 3);
  CHECK(repeated_nonlinearity_cuts(random_net(rng, {2, 2, 2, 1})).size() == 6);
}

TEST_CASE("lifted constraints hold at lifted forward traces") {
  std::mt19937_64 rng(4);
  const auto net = random_net(rng, {2, 3, 2, 2});
  const InputSet x = Rectangle{vec({0.2, -0.4}), vec({1.0, 0.7})};
  const auto cons = relu_constraints(net);
  const auto cuts = repeated_nonlinearity_cuts(net);
  for (int s = 0; s < 1000; ++s) {
    const Vector z = lifted_point(net, sample_input(x, rng));
    for (const auto& k : cons) {
      const double v = quad(k.matrix, z);
      if (k.sense == Sense::kEq) {
        CHECK(std::abs(v) <= 1e-9);
      } else {
        CHECK(v <= 1e-9);
      }
    }
    for (const auto& k : cuts) CHECK(quad(k.matrix, z) <= 1e-9);
  }
}

TEST_CASE("objective form gives twice the output direction") {
  std::mt19937_64 rng(6);
  const auto net = random_net(rng, {2, 3, 2});
  const auto maps = lifting_maps(net);
  const Vector c = vec({0.3, -1.2});
  const SymMat h = lift_out(objective_matrix(c, 2), maps);
  const Vector x0 = vec({0.5, -0.1});
  CHECK(quad(h, lifted_point(net, x0)) == doctest::Approx(2.0 * c.dot(forward(net, x0))));
}

TEST_CASE("single-neuron relaxation bounds") {
  CHECK(primal_bound(single_neuron(0), Interval{-1, 3}, vec({1})) == doctest::Approx(0).epsilon(1e-7));
  CHECK(primal_bound(single_neuron(0), Interval{-1, 3}, vec({-1})) ==
        doctest::Approx(-3).epsilon(1e-7));
  CHECK(primal_bound(single_neuron(0), Interval{1, 2}, vec({1})) == doctest::Approx(1).epsilon(1e-7));
  CHECK(dual_bound(single_neuron(0), Interval{-1, 3}, vec({1})) == doctest::Approx(0).epsilon(1e-7));
}

TEST_CASE("dual layout with and without cuts") {
  const auto sn = single_neuron(0);
  CHECK(build_deepsdp_dual(sn, Interval{-1, 3}, vec({1}), {true}).blocks.size() == 6);
  std::mt19937_64 rng(8);
  const auto net = random_net(rng, {2, 3, 2});
  const auto prob = build_deepsdp_dual(net, Rectangle{vec({0, 0}), vec({1, 1})}, vec({1, 0}), {true});
  const auto layout = dual_layout(net, {true});
  CHECK(prob.blocks.size() == 7);
  CHECK(prob.blocks[layout.mu].size == 3);
  CHECK(prob.blocks[layout.gamma].size == 2);
  CHECK(prob.blocks[layout.r].size == 6);
  CHECK(prob.num_rows() == 21);
}

TEST_CASE("cuts do not change a single-neuron optimum") {
  const auto sn = single_neuron(0.3);
  CHECK(dual_bound(sn, Interval{-2, 1}, vec({-1}), {true}) ==
        doctest::Approx(dual_bound(sn, Interval{-2, 1}, vec({-1}), {false})).epsilon(1e-9));
}

TEST_CASE("primal and dual agree and bound sampled outputs") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const auto net = random_net(rng, {2, 3, 2});
    const InputSet x = trial % 2 == 0 ? InputSet(Rectangle{vec({u(rng), u(rng)}), vec({0.5, 0.8})})
                                      : InputSet(Ellipsoid{vec({u(rng), u(rng)}), 0.7});
    const Vector c = vec({u(rng), u(rng)});
    for (bool cuts : {false, true}) {
      const double p = primal_bound(net, x, c, {cuts});
      const double d = dual_bound(net, x, c, {cuts});
      CHECK(std::abs(p - d) <= 1e-6 * (1 + std::abs(p)));
      for (int s = 0; s < 1000; ++s) CHECK(c.dot(forward(net, sample_input(x, rng))) >= d - 1e-6);
    }
  }
}

TEST_CASE("the relaxation builds for deeper networks") {
  std::mt19937_64 rng(14);
  const auto net = random_net(rng, {2, 2, 2, 1});
  const InputSet x = Rectangle{vec({0, 0}), vec({1, 1})};
  const double p = primal_bound(net, x, vec({1}));
  for (int s = 0; s < 1000; ++s) CHECK(forward(net, sample_input(x, rng))(0) >= p - 1e-6);
}
