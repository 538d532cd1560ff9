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

#include "deepsdp/formulation.hpp"

#include <string>

#include "deepsdp/errors.hpp"

namespace deepsdp {

namespace {

using conic::BlockVector;
using conic::ConeBlock;
using conic::ConicProblem;
using conic::LinearRow;

SymMat lift(const SymMat& m, const Matrix& e, const char* name) {
  if (m.dim() != e.rows())
    throw InvalidInput(std::string(name) + ": matrix has dim " + std::to_string(m.dim()) +
                       ", map expects " + std::to_string(e.rows()));
  return m.congruence(e);
}

std::string indexed(const char* name, int i) {
  return std::string(name) + "[" + std::to_string(i) + "]";
}

// Entries of the (1 + 2N)-dimensional Q matrices: index 0 is the constant,
// 1..N the pre-activations w, N+1..2N the activations phi(w).
SymMat complementarity_q(int n, int i) {
  SymMat q(1 + 2 * n);
  q.set(1 + i, 1 + n + i, -1.0);
  q.set(1 + n + i, 1 + n + i, 2.0);
  return q;
}

SymMat above_preactivation_q(int n, int i) {
  SymMat q(1 + 2 * n);
  q.set(0, 1 + i, 1.0);
  q.set(0, 1 + n + i, -1.0);
  return q;
}

SymMat nonnegative_q(int n, int i) {
  SymMat q(1 + 2 * n);
  q.set(0, 1 + n + i, -1.0);
  return q;
}

SymMat pair_cut_q(int n, int i, int j) {
  Vector diff = Vector::Zero(n);
  diff(i) = 1.0;
  diff(j) = -1.0;
  const Matrix d = diff * diff.transpose();
  Matrix q = Matrix::Zero(1 + 2 * n, 1 + 2 * n);
  q.block(1, 1 + n, n, n) = -d;
  q.block(1 + n, 1, n, n) = -d;
  q.block(1 + n, 1 + n, n, n) = 2.0 * d;
  return SymMat(q);
}

std::vector<SymMat> lifted_generators(const ReluNetwork& net, const InputSet& x,
                                      const LiftingMaps& maps) {
  std::vector<SymMat> out;
  for (const auto& p : input_generators(x, net.input_dim())) out.push_back(lift_in(p, maps));
  return out;
}

SymMat lifted_objective(const ReluNetwork& net, const Vector& c, const LiftingMaps& maps) {
  if (c.size() != net.output_dim())
    throw InvalidInput("direction has length " + std::to_string(c.size()) + ", output has " +
                       std::to_string(net.output_dim()));
  return lift_out(objective_matrix(c, net.input_dim()), maps);
}

}  // namespace

LiftingMaps lifting_maps(const ReluNetwork& net) {
  LiftingMaps m;
  const int L = net.depth();
  m.n0 = net.input_dim();
  m.num_neurons = net.num_neurons();
  m.output_dim = net.output_dim();
  const int n = m.num_neurons;
  const int cols = m.n0 + n;

  int col = 0;
  for (int k = 0; k <= L; ++k) {
    Matrix e = Matrix::Zero(net.width(k), cols);
    e.block(0, col, net.width(k), net.width(k)).setIdentity();
    m.selectors.push_back(std::move(e));
    col += net.width(k);
  }

  m.w_bar = Matrix::Zero(n, cols);
  m.b_bar = Vector::Zero(n);
  m.e_bar = Matrix::Zero(n, cols);
  int row = 0;
  for (int k = 0; k < L; ++k) {
    const Layer& l = net.layer(k);
    m.w_bar.block(row, 0, l.w.rows(), cols) = l.w * m.selectors[k];
    m.b_bar.segment(row, l.b.size()) = l.b;
    m.e_bar.block(row, 0, l.w.rows(), cols) = m.selectors[k + 1];
    row += static_cast<int>(l.w.rows());
  }

  const int dim = m.dim();
  m.e_in = Matrix::Zero(1 + m.n0, dim);
  m.e_in(0, 0) = 1.0;
  m.e_in.block(1, 1, m.n0, cols) = m.selectors[0];

  m.e_mid = Matrix::Zero(1 + 2 * n, dim);
  m.e_mid(0, 0) = 1.0;
  m.e_mid.block(1, 0, n, 1) = m.b_bar;
  m.e_mid.block(1, 1, n, cols) = m.w_bar;
  m.e_mid.block(1 + n, 1, n, cols) = m.e_bar;

  const Layer& last = net.layer(L);
  m.e_out = Matrix::Zero(1 + m.n0 + m.output_dim, dim);
  m.e_out(0, 0) = 1.0;
  m.e_out.block(1, 1, m.n0, cols) = m.selectors[0];
  m.e_out.block(1 + m.n0, 0, m.output_dim, 1) = last.b;
  m.e_out.block(1 + m.n0, 1, m.output_dim, cols) = last.w * m.selectors[L];
  return m;
}

SymMat lift_in(const SymMat& p, const LiftingMaps& maps) { return lift(p, maps.e_in, "lift_in"); }
SymMat lift_mid(const SymMat& q, const LiftingMaps& maps) {
  return lift(q, maps.e_mid, "lift_mid");
}
SymMat lift_out(const SymMat& s, const LiftingMaps& maps) {
  return lift(s, maps.e_out, "lift_out");
}

std::vector<LiftedConstraint> relu_constraints(const ReluNetwork& net) {
  const auto maps = lifting_maps(net);
  const int n = maps.num_neurons;
  std::vector<LiftedConstraint> out;
  out.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    out.push_back({lift_mid(complementarity_q(n, i), maps), Sense::kEq, 0.0,
                   indexed("relu_complementarity", i)});
    out.push_back({lift_mid(above_preactivation_q(n, i), maps), Sense::kLe, 0.0,
                   indexed("relu_above_preactivation", i)});
    out.push_back(
        {lift_mid(nonnegative_q(n, i), maps), Sense::kLe, 0.0, indexed("relu_nonnegative", i)});
  }
  return out;
}

std::vector<SymMat> input_generators(const InputSet& x, int n0) {
  validate(x);
  if (input_dim(x) != n0)
    throw InvalidInput("input set has dimension " + std::to_string(input_dim(x)) +
                       ", network expects " + std::to_string(n0));
  std::vector<SymMat> out;
  if (const auto* iv = std::get_if<Interval>(&x)) {
    SymMat p(2);
    p.set(0, 0, 2.0 * iv->lo * iv->hi);
    p.set(0, 1, -(iv->lo + iv->hi));
    p.set(1, 1, 2.0);
    out.push_back(std::move(p));
  } else if (const auto* r = std::get_if<Rectangle>(&x)) {
    for (int j = 0; j < n0; ++j) {
      const double xj = r->center(j);
      const double rj = r->radii(j);
      SymMat p(1 + n0);
      p.set(0, 0, xj * xj - rj * rj);
      p.set(0, 1 + j, -xj);
      p.set(1 + j, 1 + j, 1.0);
      out.push_back(std::move(p));
    }
  } else {
    const auto& e = std::get<Ellipsoid>(x);
    Matrix p = Matrix::Identity(1 + n0, 1 + n0);
    p(0, 0) = e.center.squaredNorm() - e.radius * e.radius;
    p.block(0, 1, 1, n0) = -e.center.transpose();
    p.block(1, 0, n0, 1) = -e.center;
    out.emplace_back(p);
  }
  return out;
}

std::vector<LiftedConstraint> repeated_nonlinearity_cuts(const ReluNetwork& net) {
  const auto maps = lifting_maps(net);
  const int n = maps.num_neurons;
  std::vector<LiftedConstraint> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out.push_back({lift_mid(pair_cut_q(n, i, j), maps), Sense::kLe, 0.0,
                     "cut[" + std::to_string(i) + "," + std::to_string(j) + "]"});
  return out;
}

SymMat objective_matrix(const Vector& c, int n0) {
  const auto m = static_cast<int>(c.size());
  SymMat h(1 + n0 + m);
  for (int i = 0; i < m; ++i) h.set(0, 1 + n0 + i, c(i));
  return h;
}

ConicProblem build_primal_relaxation(const ReluNetwork& net, const InputSet& x, const Vector& c,
                                     const FormulationOptions& opts) {
  const auto maps = lifting_maps(net);
  const int dim = maps.dim();
  const std::vector<ConeBlock> blocks = {ConeBlock::Psd(dim, "G")};
  const BlockVector objective = {lifted_objective(net, c, maps).matrix()};

  auto row = [](const SymMat& a, double rhs) { return LinearRow{{a.matrix()}, rhs}; };

  std::vector<LinearRow> ineq;
  for (const auto& p : lifted_generators(net, x, maps)) ineq.push_back(row(p, 0.0));
  // Complementarity enters as LE, the sense under which the nonnegative
  // multiplier lambda of the DeepSDP program is its exact conic dual.
  for (const auto& k : relu_constraints(net)) ineq.push_back(row(k.matrix, k.rhs));
  if (opts.cuts)
    for (const auto& k : repeated_nonlinearity_cuts(net)) ineq.push_back(row(k.matrix, k.rhs));

  SymMat corner(dim);
  corner.set(0, 0, 1.0);
  const std::vector<LinearRow> eq = {row(corner, 1.0)};
  return conic::to_standard_form(blocks, objective, ineq, eq);
}

DualLayout dual_layout(const ReluNetwork& net, const FormulationOptions& opts) {
  DualLayout l;
  if (opts.cuts && net.num_neurons() >= 2) {
    l.mu = 4;
    l.d = 5;
    l.r = 6;
  }
  return l;
}

ConicProblem build_deepsdp_dual(const ReluNetwork& net, const InputSet& x, const Vector& c,
                                const FormulationOptions& opts) {
  const auto maps = lifting_maps(net);
  const int dim = maps.dim();
  const int n = maps.num_neurons;
  const auto layout = dual_layout(net, opts);

  const auto gens = lifted_generators(net, x, maps);
  const auto relu = relu_constraints(net);
  const auto cuts =
      layout.mu >= 0 ? repeated_nonlinearity_cuts(net) : std::vector<LiftedConstraint>{};
  const SymMat h = lifted_objective(net, c, maps);

  ConicProblem prob;
  prob.blocks.resize(layout.mu >= 0 ? 7 : 6);
  prob.blocks[layout.gamma] = ConeBlock::Nonneg(static_cast<int>(gens.size()), "gamma");
  prob.blocks[layout.lambda] = ConeBlock::Nonneg(n, "lambda");
  prob.blocks[layout.nu] = ConeBlock::Nonneg(n, "nu");
  prob.blocks[layout.eta] = ConeBlock::Nonneg(n, "eta");
  if (layout.mu >= 0) prob.blocks[layout.mu] = ConeBlock::Nonneg(static_cast<int>(cuts.size()), "mu");
  prob.blocks[layout.d] = ConeBlock::Free(1, "d");
  prob.blocks[layout.r] = ConeBlock::Psd(dim, "R");

  prob.objective = conic::zeros_like(prob.blocks);
  prob.objective[layout.d](0) = -2.0;

  // R - sum_k m_k A_k + 2d E_11 = M_out(H_c), one row per upper-triangular entry.
  for (int p = 0; p < dim; ++p) {
    for (int q = p; q < dim; ++q) {
      LinearRow row = prob.make_row(h(p, q));
      if (p == q) {
        row.coef[layout.r](p, p) = 1.0;
      } else {
        row.coef[layout.r](p, q) = 0.5;
        row.coef[layout.r](q, p) = 0.5;
      }
      for (std::size_t k = 0; k < gens.size(); ++k) row.coef[layout.gamma](k) = -gens[k](p, q);
      for (int i = 0; i < n; ++i) {
        row.coef[layout.lambda](i) = -relu[3 * i].matrix(p, q);
        row.coef[layout.nu](i) = -relu[3 * i + 1].matrix(p, q);
        row.coef[layout.eta](i) = -relu[3 * i + 2].matrix(p, q);
      }
      for (std::size_t k = 0; k < cuts.size(); ++k) row.coef[layout.mu](k) = -cuts[k].matrix(p, q);
      if (p == 0 && q == 0) row.coef[layout.d](0) = 2.0;
      prob.eq_constraints.push_back(std::move(row));
    }
  }
  return prob;
}

SymMat denormalize_gram(const SymMat& g, const InputNormalization& n) {
  const auto n0 = n.shift.size();
  if (g.dim() < 1 + n0) throw InvalidInput("Gram matrix is smaller than the input block");
  Matrix t = Matrix::Identity(g.dim(), g.dim());
  t.block(1, 0, n0, 1) = n.shift;
  t.block(1, 1, n0, n0) = n.scale.asDiagonal();
  return SymMat(Matrix(t * g.matrix() * t.transpose()));
}

Vector lifted_point(const ReluNetwork& net, const Vector& x0) {
  const auto t = forward_trace(net, x0);
  const Vector neurons = t.stacked_neurons();
  Vector z(1 + x0.size() + neurons.size());
  z(0) = 1.0;
  z.segment(1, x0.size()) = x0;
  z.tail(neurons.size()) = neurons;
  return z;
}

}  // namespace deepsdp
