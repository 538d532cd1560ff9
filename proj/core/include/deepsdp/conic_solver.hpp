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

#include <iosfwd>
#include <string>
#include <vector>

#include "deepsdp/linalg.hpp"

namespace deepsdp::conic {

using linalg::Matrix;
using linalg::Vector;

enum class ConeKind { kPsd, kNonneg, kFree };

struct ConeBlock {
  ConeKind kind = ConeKind::kNonneg;
  int size = 1;  // matrix dimension for PSD, vector length otherwise
  std::string label;

  static ConeBlock Psd(int dim, std::string label = {}) {
    return {ConeKind::kPsd, dim, std::move(label)};
  }
  static ConeBlock Nonneg(int len, std::string label = {}) {
    return {ConeKind::kNonneg, len, std::move(label)};
  }
  static ConeBlock Free(int len, std::string label = {}) {
    return {ConeKind::kFree, len, std::move(label)};
  }
};

/// One value or coefficient object per block: a symmetric size x size matrix
/// for PSD blocks, a size x 1 column for the others.
using BlockVector = std::vector<Matrix>;

BlockVector zeros_like(const std::vector<ConeBlock>& blocks);
double block_dot(const BlockVector& a, const BlockVector& b);

struct LinearRow {
  BlockVector coef;
  double rhs = 0.0;
};

/// min sum_k <objective[k], X[k]>  s.t.  sum_k <row.coef[k], X[k]> = row.rhs,
/// X[k] in blocks[k].
struct ConicProblem {
  std::vector<ConeBlock> blocks;
  BlockVector objective;
  std::vector<LinearRow> eq_constraints;

  int num_rows() const { return static_cast<int>(eq_constraints.size()); }
  /// Throws InvalidProblem on any shape mismatch.
  void validate() const;
  /// Fresh all-zero row shaped for this problem.
  LinearRow make_row(double rhs = 0.0) const;
};

/// Appends one NONNEG slack block (label "slack") so that every
/// `<a, X> <= rhs` row becomes `<a, X> + s = rhs`.
ConicProblem to_standard_form(const std::vector<ConeBlock>& blocks,
                              const BlockVector& objective,
                              const std::vector<LinearRow>& ineq_constraints,
                              const std::vector<LinearRow>& eq_constraints);

enum class SolveStatus {
  kOptimal,
  kInfeasiblePrimal,
  kInfeasibleDual,
  kMaxIter,
  kNumericalFail
};

std::string to_string(SolveStatus status);

struct Residuals {
  double primal_feas = 0.0;
  double dual_feas = 0.0;
  double gap = 0.0;
  double max() const;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFail;
  BlockVector primal;      // X per block, free blocks recombined
  BlockVector dual_slack;  // S per block
  Vector dual;             // multiplier per equality row
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  Residuals residuals;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  /// When set, one JSON record per iteration is written here.
  std::ostream* trace = nullptr;
};

/// Homogeneous self-dual primal-dual interior point method with
/// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts = {});

}  // namespace deepsdp::conic
