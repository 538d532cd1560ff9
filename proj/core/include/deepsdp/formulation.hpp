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

#include <string>
#include <vector>

#include "deepsdp/conic_solver.hpp"
#include "deepsdp/linalg.hpp"
#include "deepsdp/network.hpp"

namespace deepsdp {

using linalg::SymMat;

enum class Sense { kEq, kLe };

/// <matrix, G> (sense) rhs over the lifted Gram matrix of [1; x^0; ...; x^L].
struct LiftedConstraint {
  SymMat matrix;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
  std::string tag;
};

/// Embedding data for the lifted vector z = [1; x^0; ...; x^L].
struct LiftingMaps {
  int n0 = 0;
  int num_neurons = 0;
  int output_dim = 0;
  Matrix w_bar;                    // N x (n0 + N), block diagonal W^0..W^{L-1}, zero last column block
  Vector b_bar;                    // (b^0; ...; b^{L-1})
  Matrix e_bar;                    // N x (n0 + N), stacks E^1..E^L
  std::vector<Matrix> selectors;   // E^0..E^L, E^k x = x^k
  Matrix e_in;                     // (1 + n0) x dim
  Matrix e_mid;                    // (1 + 2N) x dim
  Matrix e_out;                    // (1 + n0 + n_{L+1}) x dim

  int dim() const { return 1 + n0 + num_neurons; }
};

LiftingMaps lifting_maps(const ReluNetwork& net);

/// Congruences E^T M E. Throw InvalidInput when M does not match E.
SymMat lift_in(const SymMat& p, const LiftingMaps& maps);
SymMat lift_mid(const SymMat& q, const LiftingMaps& maps);
SymMat lift_out(const SymMat& s, const LiftingMaps& maps);

/// Per neuron: complementarity (EQ), phi >= w (LE), phi >= 0 (LE), in that
/// order, lifted to dim 1 + n0 + N.
std::vector<LiftedConstraint> relu_constraints(const ReluNetwork& net);

/// Unit-multiplier generators P of the input set, each meaning
/// [1; x]^T P [1; x] <= 0. One matrix for intervals and balls, n0 for boxes.
std::vector<SymMat> input_generators(const InputSet& x, int n0);

/// (e_i - e_j) pair cuts for i < j, lifted. Empty when N < 2.
std::vector<LiftedConstraint> repeated_nonlinearity_cuts(const ReluNetwork& net);

/// [[0, 0, c^T], [0, O, O], [c, O, O]] of dim 1 + n0 + n_{L+1}; its quadratic
/// form at [1; x^0; y] is 2 c^T y.
SymMat objective_matrix(const Vector& c, int n0);

struct FormulationOptions {
  bool cuts = false;
};

/// min <M_out(H_c), G> with one PSD block G (block 0) and G_11 = 1 as the
/// first equality row. Every inequality is an LE row with a slack in block 1.
/// The bound is d* = primal_obj / 2.
conic::ConicProblem build_primal_relaxation(const ReluNetwork& net, const InputSet& x,
                                            const Vector& c, const FormulationOptions& opts = {});

/// Block indices of the problem returned by build_deepsdp_dual.
struct DualLayout {
  int gamma = 0;
  int lambda = 1;
  int nu = 2;
  int eta = 3;
  int mu = -1;  // present only with cuts and N >= 2
  int d = 4;
  int r = 5;
};

DualLayout dual_layout(const ReluNetwork& net, const FormulationOptions& opts);

/// max 2d over gamma, lambda, nu, eta, (mu) >= 0 and free d such that
/// R = M_in(P) + M_mid(Q) + M_out(S) is PSD. Posed as the minimization of
/// -2d, so d* = -primal_obj / 2 of the returned problem.
conic::ConicProblem build_deepsdp_dual(const ReluNetwork& net, const InputSet& x,
                                       const Vector& c, const FormulationOptions& opts = {});

/// Maps a Gram matrix of [1; s; x^1; ...] solved on normalize_input's
/// network back to [1; x^0; x^1; ...] by the congruence x^0 = shift + scale .* s.
SymMat denormalize_gram(const SymMat& g, const InputNormalization& n);

/// Lifted vector [1; x^0; x^1; ...; x^L] of a forward pass.
Vector lifted_point(const ReluNetwork& net, const Vector& x0);

}  // namespace deepsdp
