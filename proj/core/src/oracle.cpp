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

#include "deepsdp/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "deepsdp/errors.hpp"
#include "deepsdp/tightness.hpp"

namespace deepsdp {

namespace {

using conic::ConeBlock;
using conic::LinearRow;

// alpha^T x0 + beta <= 0
struct HalfSpace {
  Vector alpha;
  double beta = 0.0;
};

struct PatternModel {
  std::vector<HalfSpace> cell;
  Vector objective;  // c^T f(x0) = objective^T x0 + constant on the cell
  bool trivially_empty = false;
};

PatternModel pattern_model(const ReluNetwork& net, const Vector& c, std::int64_t mask) {
  const int n0 = net.input_dim();
  PatternModel m;
  Matrix a = Matrix::Identity(n0, n0);
  Vector off = Vector::Zero(n0);
  int bit = 0;
  for (int k = 0; k < net.depth(); ++k) {
    const Layer& l = net.layer(k);
    Matrix pre_a = l.w * a;
    Vector pre_off = l.w * off + l.b;
    for (Eigen::Index i = 0; i < pre_a.rows(); ++i, ++bit) {
      const bool active = (mask >> bit) & 1;
      const double sign = active ? -1.0 : 1.0;
      HalfSpace h{sign * pre_a.row(i).transpose(), sign * pre_off(i)};
      if (h.alpha.cwiseAbs().maxCoeff() == 0.0) {
        if (h.beta > 0.0) m.trivially_empty = true;
        continue;
      }
      m.cell.push_back(std::move(h));
      if (!active) {
        pre_a.row(i).setZero();
        pre_off(i) = 0.0;
      }
    }
    a = std::move(pre_a);
    off = std::move(pre_off);
  }
  const Layer& last = net.layer(net.depth());
  m.objective = (last.w * a).transpose() * c;
  return m;
}

LinearRow dense_row(int blocks_size, double rhs) {
  LinearRow r;
  r.coef.assign(blocks_size, Matrix());
  r.rhs = rhs;
  return r;
}

// x0 = lo + t with 0 <= t <= hi - lo.
conic::ConicProblem box_problem(const PatternModel& m, const Vector& lo, const Vector& hi) {
  const auto n = static_cast<int>(lo.size());
  const std::vector<ConeBlock> blocks = {ConeBlock::Nonneg(n, "t")};
  std::vector<LinearRow> ineq;
  for (int j = 0; j < n; ++j) {
    LinearRow r = dense_row(1, hi(j) - lo(j));
    r.coef[0] = Vector::Unit(n, j);
    ineq.push_back(std::move(r));
  }
  for (const auto& h : m.cell) {
    LinearRow r = dense_row(1, -h.beta - h.alpha.dot(lo));
    r.coef[0] = h.alpha;
    ineq.push_back(std::move(r));
  }
  return conic::to_standard_form(blocks, {m.objective}, ineq, {});
}

// x0 = xhat + d with d = Y(0:n, n) and Y = [[rho I, d], [d^T, rho]] PSD.
conic::ConicProblem ball_problem(const PatternModel& m, const Ellipsoid& e) {
  const auto n = static_cast<int>(e.center.size());
  const std::vector<ConeBlock> blocks = {ConeBlock::Psd(n + 1, "Y")};
  auto column_coef = [&](const Vector& v) {
    Matrix coef = Matrix::Zero(n + 1, n + 1);
    coef.block(0, n, n, 1) = 0.5 * v;
    coef.block(n, 0, 1, n) = 0.5 * v.transpose();
    return coef;
  };
  std::vector<LinearRow> eq;
  for (int i = 0; i <= n; ++i) {
    for (int j = i; j < n || (i == n && j == n); ++j) {
      Matrix coef = Matrix::Zero(n + 1, n + 1);
      coef(i, j) = i == j ? 1.0 : 0.5;
      coef(j, i) = coef(i, j);
      eq.push_back({{coef}, i == j ? e.radius : 0.0});
    }
  }
  std::vector<LinearRow> ineq;
  for (const auto& h : m.cell)
    ineq.push_back({{column_coef(h.alpha)}, -h.beta - h.alpha.dot(e.center)});
  return conic::to_standard_form(blocks, {column_coef(m.objective)}, ineq, eq);
}

Vector recover_input(const InputSet& x, const conic::ConicSolution& sol, const Vector& lo) {
  if (const auto* e = std::get_if<Ellipsoid>(&x)) {
    const auto n = e->center.size();
    return e->center + sol.primal[0].block(0, n, n, 1);
  }
  return lo + sol.primal[0].col(0);
}

bool is_point(const InputSet& x) {
  if (const auto* iv = std::get_if<Interval>(&x)) return iv->lo == iv->hi;
  return false;
}

std::vector<bool> activation_pattern(const ReluNetwork& net, const Vector& x0) {
  std::vector<bool> out;
  Vector cur = x0;
  for (int k = 0; k < net.depth(); ++k) {
    const Layer& l = net.layer(k);
    const Vector pre = l.w * cur + l.b;
    for (Eigen::Index i = 0; i < pre.size(); ++i) out.push_back(pre(i) > 0.0);
    cur = pre.cwiseMax(0.0);
  }
  return out;
}

}  // namespace

std::string to_string(OracleStatus s) { return s == OracleStatus::kExact ? "EXACT" : "CAPPED"; }

OracleResult exact_minimize(const ReluNetwork& net, const InputSet& x, const Vector& c,
                            const OracleOptions& opts) {
  validate(x);
  if (input_dim(x) != net.input_dim())
    throw InvalidInput("input set has dimension " + std::to_string(input_dim(x)) +
                       ", network expects " + std::to_string(net.input_dim()));
  if (c.size() != net.output_dim()) throw InvalidInput("direction length does not match output");
  const int n = net.num_neurons();

  OracleResult best;
  best.opt_value = std::numeric_limits<double>::infinity();

  if (is_point(x)) {
    best.argmin_x0 = center(x);
    best.opt_value = 2.0 * c.dot(forward(net, best.argmin_x0));
    best.pattern = activation_pattern(net, best.argmin_x0);
    return best;
  }

  Vector lo, hi;
  if (const auto* iv = std::get_if<Interval>(&x)) {
    lo = Vector::Constant(1, iv->lo);
    hi = Vector::Constant(1, iv->hi);
  } else if (const auto* r = std::get_if<Rectangle>(&x)) {
    lo = r->center - r->radii;
    hi = r->center + r->radii;
  }

  const std::int64_t total = n >= 62 ? std::numeric_limits<std::int64_t>::max()
                                     : (std::int64_t{1} << n);
  const std::int64_t visit = std::min(total, opts.cap);
  best.status = visit < total ? OracleStatus::kCapped : OracleStatus::kExact;

  for (std::int64_t mask = 0; mask < visit; ++mask) {
    const auto model = pattern_model(net, c, mask);
    if (model.trivially_empty) {
      ++best.infeasible_patterns;
      continue;
    }
    const auto prob = std::holds_alternative<Ellipsoid>(x)
                          ? ball_problem(model, std::get<Ellipsoid>(x))
                          : box_problem(model, lo, hi);
    const auto sol = conic::solve(prob, opts.solver);
    ++best.subproblems_solved;
    if (sol.status == conic::SolveStatus::kInfeasiblePrimal) {
      ++best.infeasible_patterns;
      continue;
    }
    if (sol.status != conic::SolveStatus::kOptimal) ++best.unsettled_patterns;

    const Vector x0 = project_to_input(x, recover_input(x, sol, lo));
    const double value = 2.0 * c.dot(forward(net, x0));
    if (value < best.opt_value) {
      best.opt_value = value;
      best.argmin_x0 = x0;
      best.pattern.assign(n, false);
      for (int i = 0; i < n; ++i) best.pattern[i] = (mask >> i) & 1;
    }
  }
  if (!std::isfinite(best.opt_value)) throw EmptyInput("no activation pattern is feasible on X");
  return best;
}

double sample_bound(const ReluNetwork& net, const InputSet& x, const Vector& c, int n_samples,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s)
    best = std::min(best, 2.0 * c.dot(forward(net, sample_input(x, rng))));
  return best;
}

}  // namespace deepsdp
