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

#include "deepsdp/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "deepsdp/errors.hpp"

namespace deepsdp::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fraction of the distance to the cone boundary taken by each step.
constexpr double kStepFraction = 0.98;
// tau / kappa below this marks the embedding as infeasible.
constexpr double kInfeasibleRatio = 1e-8;
constexpr int kStallIterations = 15;


std::string block_name(const ConeBlock& b, std::size_t k) {
  return b.label.empty() ? "block " + std::to_string(k) : "block '" + b.label + "'";
}

void check_shape(const ConeBlock& blk, const Matrix& m, std::size_t k,
                 const std::string& what) {
  const bool ok = blk.kind == ConeKind::kPsd
                      ? (m.rows() == blk.size && m.cols() == blk.size)
                      : (m.rows() == blk.size && m.cols() == 1);
  if (!ok) {
    throw InvalidProblem(what + ": coefficient for " + block_name(blk, k) +
                         " has shape " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

// Internal model: only PSD and NONNEG cones. A FREE block of length n is
// split into a NONNEG block of length 2n holding (x+, x-).
struct Model {
  std::vector<bool> psd;
  std::vector<int> size;
  BlockVector c;
  std::vector<BlockVector> rows;
  std::vector<std::vector<int>> row_support;  // blocks with nonzero coef
  Vector b;
  std::vector<bool> split;  // original block k was FREE
  int degree = 0;
};

Matrix expand_free(const Matrix& v) {
  Matrix out(2 * v.rows(), 1);
  out << v, -v;
  return out;
}

Model build_model(const ConicProblem& p) {
  Model m;
  const std::size_t nb = p.blocks.size();
  for (const auto& blk : p.blocks) {
    const bool free = blk.kind == ConeKind::kFree;
    m.psd.push_back(blk.kind == ConeKind::kPsd);
    m.size.push_back(free ? 2 * blk.size : blk.size);
    m.split.push_back(free);
    m.degree += free ? 2 * blk.size : blk.size;
  }
  auto convert = [&](const BlockVector& v) {
    BlockVector out(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      out[k] = m.split[k] ? expand_free(v[k])
                          : (m.psd[k] ? Matrix(0.5 * (v[k] + v[k].transpose()))
                                      : v[k]);
    }
    return out;
  };
  m.c = convert(p.objective);
  m.b.resize(p.num_rows());
  for (int i = 0; i < p.num_rows(); ++i) {
    m.rows.push_back(convert(p.eq_constraints[i].coef));
    m.b(i) = p.eq_constraints[i].rhs;
    std::vector<int> support;
    for (std::size_t k = 0; k < nb; ++k)
      if (m.rows.back()[k].cwiseAbs().maxCoeff() > 0.0) support.push_back(static_cast<int>(k));
    m.row_support.push_back(std::move(support));
  }
  return m;
}

double dot(const BlockVector& a, const BlockVector& b) { return block_dot(a, b); }

double norm(const BlockVector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const BlockVector& x, BlockVector& y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

BlockVector scaled(const BlockVector& x, double alpha) {
  BlockVector out = x;
  for (auto& m : out) m *= alpha;
  return out;
}

Vector apply_a(const Model& m, const BlockVector& x) {
  Vector out = Vector::Zero(m.b.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    for (int k : m.row_support[i])
      out(i) += (m.rows[i][k].array() * x[k].array()).sum();
  return out;
}

BlockVector apply_at(const Model& m, const Vector& y) {
  BlockVector out(m.size.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = Matrix::Zero(m.size[k], m.psd[k] ? m.size[k] : 1);
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    for (int k : m.row_support[i]) out[k] += y(i) * m.rows[i][k];
  return out;
}

BlockVector identity_like(const Model& m, double scale) {
  BlockVector out(m.size.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = m.psd[k] ? Matrix(scale * Matrix::Identity(m.size[k], m.size[k]))
                      : Matrix(Matrix::Constant(m.size[k], 1, scale));
  }
  return out;
}

// Nesterov-Todd scaling of one cone: W = G G^T with G^{-1} X G^{-T} =
// G^T S G = diag(lambda).
struct ConeScaling {
  Matrix g, ginv, w;  // PSD only
  Vector gv;          // NONNEG: diag of G
  Vector lambda;
};

std::optional<ConeScaling> nt_scaling(bool psd, const Matrix& x, const Matrix& s) {
  ConeScaling sc;
  if (!psd) {
    if ((x.array() <= 0.0).any() || (s.array() <= 0.0).any()) return std::nullopt;
    sc.gv = (x.array() / s.array()).sqrt();
    sc.lambda = (x.array() * s.array()).sqrt();
    return sc;
  }
  const auto lx = linalg::chol_psd(x);
  const auto ls = linalg::chol_psd(s);
  if (!lx.ok() || !ls.ok()) return std::nullopt;
  const Matrix& l = *lx.lower;
  const Matrix& r = *ls.lower;
  Eigen::JacobiSVD<Matrix> svd(r.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  if ((sv.array() <= 0.0).any()) return std::nullopt;
  const Vector inv_sqrt = sv.cwiseSqrt().cwiseInverse();
  sc.g = l * svd.matrixV() * inv_sqrt.asDiagonal();
  sc.ginv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * r.transpose();
  sc.w = sc.g * sc.g.transpose();
  sc.lambda = sv;
  return sc;
}

// NT scaling at (G (lambda + a dx~) G^T, G^{-T} (lambda + a ds~) G^{-1}),
// computed from factors of the scaled iterates only.
std::optional<ConeScaling> rescale_psd(const ConeScaling& sc, const Matrix& dxs,
                                       const Matrix& dss, double alpha) {
  const Matrix lam = sc.lambda.asDiagonal();
  const Matrix xt = lam + alpha * 0.5 * (dxs + dxs.transpose());
  const Matrix st = lam + alpha * 0.5 * (dss + dss.transpose());
  const auto l1 = linalg::chol_psd(xt);
  const auto l2 = linalg::chol_psd(st);
  if (!l1.ok() || !l2.ok()) return std::nullopt;
  Eigen::JacobiSVD<Matrix> svd(l2.lower->transpose() * *l1.lower,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  if (!(sv.minCoeff() > 0.0)) return std::nullopt;
  const Vector inv_sqrt = sv.cwiseSqrt().cwiseInverse();
  ConeScaling out;
  out.g = sc.g * *l1.lower * svd.matrixV() * inv_sqrt.asDiagonal();
  out.ginv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * l2.lower->transpose() * sc.ginv;
  out.w = out.g * out.g.transpose();
  out.lambda = sv;
  return out;
}

Matrix apply_w(bool psd, const ConeScaling& sc, const Matrix& a) {
  if (psd) return sc.w * a * sc.w;
  return sc.gv.array().square().matrix().asDiagonal() * a;
}

Matrix to_scaled_x(bool psd, const ConeScaling& sc, const Matrix& dx) {
  if (psd) return sc.ginv * dx * sc.ginv.transpose();
  return dx.array() / sc.gv.array();
}

Matrix to_scaled_s(bool psd, const ConeScaling& sc, const Matrix& ds) {
  if (psd) return sc.g.transpose() * ds * sc.g;
  return ds.array() * sc.gv.array();
}

Matrix from_scaled(bool psd, const ConeScaling& sc, const Matrix& z) {
  if (psd) return sc.g * z * sc.g.transpose();
  return z.array() * sc.gv.array();
}

// Solves lambda o Z = r for the Jordan product of the cone.
Matrix lambda_divide(bool psd, const Vector& lambda, const Matrix& r) {
  if (!psd) return r.array() / lambda.array();
  Matrix z(r.rows(), r.cols());
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      z(i, j) = 2.0 * r(i, j) / (lambda(i) + lambda(j));
  return z;
}

Matrix jordan(bool psd, const Matrix& a, const Matrix& b) {
  if (!psd) return a.array() * b.array();
  return 0.5 * (a * b + b * a);
}

Matrix lambda_square(bool psd, const Vector& lambda) {
  if (!psd) return lambda.array().square().matrix();
  return lambda.array().square().matrix().asDiagonal();
}

// Largest alpha with lambda + alpha * d inside the cone (scaled space).
double max_step(bool psd, const Vector& lambda, const Matrix& d) {
  if (!psd) {
    double alpha = kInf;
    for (Eigen::Index k = 0; k < d.rows(); ++k)
      if (d(k, 0) < 0.0) alpha = std::min(alpha, -lambda(k) / d(k, 0));
    return alpha;
  }
  const Vector inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
  const Matrix t = inv_sqrt.asDiagonal() * d * inv_sqrt.asDiagonal();
  const double min_eig = linalg::eig_sym(linalg::SymMat(t)).values.minCoeff();
  return min_eig < 0.0 ? -1.0 / min_eig : kInf;
}

// Split free variables drift: x+ and x- grow together without changing
// A x, which ruins the conditioning of the normal equations. Remove most of
// the common part.
void reduce_drift(Matrix& x, double mu) {
  const Eigen::Index n = x.rows() / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lo = std::min(x(i, 0), x(n + i, 0));
    const double keep = std::max(std::abs(x(i, 0) - x(n + i, 0)), std::sqrt(mu));
    const double shift = 0.8 * (lo - keep);
    if (shift > 0.0) {
      x(i, 0) -= shift;
      x(n + i, 0) -= shift;
    }
  }
}

struct Iterate {
  BlockVector x, s;
  Vector y;
  double tau = 1.0;
  double kappa = 1.0;
};

struct Direction {
  BlockVector dx, ds;
  Vector dy;
  double dtau = 0.0;
  double dkappa = 0.0;
};

// Normal-equation factor with a couple of refinement sweeps.
class SchurSolver {
 public:
  bool factor(const Matrix& m) {
    m_ = m;
    const double scale = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    for (double shift : {0.0, 1e-14, 1e-12, 1e-10, 1e-8}) {
      auto res = linalg::chol_psd(m, shift * scale);
      if (res.ok()) {
        l_ = std::move(*res.lower);
        return true;
      }
    }
    return false;
  }

  Vector solve(const Vector& rhs) const {
    Vector x = linalg::chol_solve(l_, rhs);
    for (int sweep = 0; sweep < 2; ++sweep) x += linalg::chol_solve(l_, rhs - m_ * x);
    return x;
  }

 private:
  Matrix m_, l_;
};

struct Measures {
  double pobj, dobj;
  Residuals res;
};

Measures measure(const Model& m, const Iterate& it, double bnorm, double cnorm) {
  Measures out{};
  const double tau = it.tau;
  out.pobj = dot(m.c, it.x) / tau;
  out.dobj = m.b.dot(it.y) / tau;
  out.res.primal_feas = (apply_a(m, it.x) - tau * m.b).norm() / (tau * (1.0 + bnorm));
  BlockVector rd = apply_at(m, it.y);
  axpy(1.0, it.s, rd);
  axpy(-tau, m.c, rd);
  out.res.dual_feas = norm(rd) / (tau * (1.0 + cnorm));
  const double compl_gap = dot(it.x, it.s) / (tau * tau);
  out.res.gap = std::max(std::abs(out.pobj - out.dobj), compl_gap) / (1.0 + std::abs(out.pobj));
  return out;
}

ConicSolution package(const ConicProblem& p, const Model& m, const Iterate& it,
                      const Measures& meas, SolveStatus status, int iterations) {
  ConicSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.residuals = meas.res;
  sol.primal_obj = meas.pobj;
  sol.dual_obj = meas.dobj;
  // Infeasibility certificates are returned unnormalized.
  const bool certificate = status == SolveStatus::kInfeasiblePrimal ||
                           status == SolveStatus::kInfeasibleDual;
  const double inv_tau = certificate ? 1.0 : 1.0 / it.tau;
  sol.dual = it.y * inv_tau;
  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    const int n = p.blocks[k].size;
    if (m.split[k]) {
      sol.primal.push_back((it.x[k].topRows(n) - it.x[k].bottomRows(n)) * inv_tau);
      sol.dual_slack.push_back(it.s[k].topRows(n) * inv_tau);
    } else {
      sol.primal.push_back(it.x[k] * inv_tau);
      sol.dual_slack.push_back(it.s[k] * inv_tau);
    }
  }
  return sol;
}

}  // namespace

BlockVector zeros_like(const std::vector<ConeBlock>& blocks) {
  BlockVector out;
  out.reserve(blocks.size());
  for (const auto& b : blocks)
    out.push_back(Matrix::Zero(b.size, b.kind == ConeKind::kPsd ? b.size : 1));
  return out;
}

double block_dot(const BlockVector& a, const BlockVector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double Residuals::max() const { return std::max({primal_feas, dual_feas, gap}); }

void ConicProblem::validate() const {
  if (blocks.empty()) throw InvalidProblem("conic problem has no blocks");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].size < 1)
      throw InvalidProblem(block_name(blocks[k], k) + " has size < 1");
  }
  if (objective.size() != blocks.size())
    throw InvalidProblem("objective has " + std::to_string(objective.size()) +
                         " blocks, problem has " + std::to_string(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k) check_shape(blocks[k], objective[k], k, "objective");
  for (std::size_t i = 0; i < eq_constraints.size(); ++i) {
    const auto& row = eq_constraints[i];
    const std::string what = "row " + std::to_string(i);
    if (row.coef.size() != blocks.size())
      throw InvalidProblem(what + " has " + std::to_string(row.coef.size()) + " blocks");
    for (std::size_t k = 0; k < blocks.size(); ++k) check_shape(blocks[k], row.coef[k], k, what);
    if (!std::isfinite(row.rhs)) throw InvalidProblem(what + " has non-finite rhs");
  }
}

LinearRow ConicProblem::make_row(double rhs) const { return {zeros_like(blocks), rhs}; }

ConicProblem to_standard_form(const std::vector<ConeBlock>& blocks, const BlockVector& objective,
                              const std::vector<LinearRow>& ineq_constraints,
                              const std::vector<LinearRow>& eq_constraints) {
  ConicProblem p{blocks, objective, eq_constraints};
  const int m = static_cast<int>(ineq_constraints.size());
  if (m == 0) {
    p.validate();
    return p;
  }
  p.blocks.push_back(ConeBlock::Nonneg(m, "slack"));
  p.objective.push_back(Matrix::Zero(m, 1));
  for (auto& row : p.eq_constraints) row.coef.push_back(Matrix::Zero(m, 1));
  for (int i = 0; i < m; ++i) {
    LinearRow row = ineq_constraints[i];
    Matrix slack = Matrix::Zero(m, 1);
    slack(i, 0) = 1.0;
    row.coef.push_back(std::move(slack));
    p.eq_constraints.push_back(std::move(row));
  }
  p.validate();
  return p;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "OPTIMAL";
    case SolveStatus::kInfeasiblePrimal: return "INFEASIBLE_PRIMAL";
    case SolveStatus::kInfeasibleDual: return "INFEASIBLE_DUAL";
    case SolveStatus::kMaxIter: return "MAX_ITER";
    case SolveStatus::kNumericalFail: return "NUMERICAL_FAIL";
  }
  return "UNKNOWN";
}

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts) {
  problem.validate();
  const Model m = build_model(problem);
  const std::size_t nb = m.size.size();
  const double bnorm = m.b.norm();
  const double cnorm = norm(m.c);
  const double nu = static_cast<double>(m.degree);

  Iterate it;
  const double bmax = m.b.size() > 0 ? m.b.cwiseAbs().maxCoeff() : 0.0;
  double cmax = 0.0;
  for (const auto& ck : m.c) cmax = std::max(cmax, ck.cwiseAbs().maxCoeff());
  it.x = identity_like(m, 1.0 + bmax);
  it.s = identity_like(m, 1.0 + cmax);
  it.y = Vector::Zero(m.b.size());

  std::vector<ConeScaling> sc(nb);
  for (std::size_t k = 0; k < nb; ++k) sc[k] = *nt_scaling(m.psd[k], it.x[k], it.s[k]);

  Iterate best = it;
  Measures best_meas = measure(m, it, bnorm, cnorm);
  int best_iter = 0;

  for (int iter = 0;; ++iter) {
    const Measures meas = measure(m, it, bnorm, cnorm);
    if (meas.res.max() < best_meas.res.max()) {
      best = it;
      best_meas = meas;
      best_iter = iter;
    }
    const double mu = (dot(it.x, it.s) + it.tau * it.kappa) / (nu + 1.0);
    if (opts.trace) {
      *opts.trace << "{\"iter\":" << iter << ",\"mu\":" << mu << ",\"pobj\":" << meas.pobj
                  << ",\"dobj\":" << meas.dobj << ",\"primal_feas\":" << meas.res.primal_feas
                  << ",\"dual_feas\":" << meas.res.dual_feas << ",\"gap\":" << meas.res.gap
                  << ",\"tau\":" << it.tau << ",\"kappa\":" << it.kappa << "}\n";
    }
    if (meas.res.max() <= opts.tol) return package(problem, m, it, meas, SolveStatus::kOptimal, iter);

    // Infeasibility: the embedding drives tau to zero while kappa stays put.
    if (it.tau < kInfeasibleRatio * it.kappa) {
      const double by = m.b.dot(it.y);
      const double cx = dot(m.c, it.x);
      const auto status = by > 0.0 ? SolveStatus::kInfeasiblePrimal
                                   : (cx < 0.0 ? SolveStatus::kInfeasibleDual
                                               : SolveStatus::kNumericalFail);
      return package(problem, m, status == SolveStatus::kNumericalFail ? best : it,
                     status == SolveStatus::kNumericalFail ? best_meas : meas, status, iter);
    }
    if (iter >= opts.max_iter) return package(problem, m, best, best_meas, SolveStatus::kMaxIter, iter);
    // Rounding has taken over once the residuals stop improving.
    if (iter - best_iter > kStallIterations)
      return package(problem, m, best, best_meas, SolveStatus::kNumericalFail, iter);

    // PSD scalings are carried over from the previous step; linear ones are
    // cheap and exact to recompute.
    for (std::size_t k = 0; k < nb; ++k) {
      if (m.psd[k]) continue;
      auto s = nt_scaling(false, it.x[k], it.s[k]);
      if (!s) return package(problem, m, best, best_meas, SolveStatus::kNumericalFail, iter);
      sc[k] = std::move(*s);
    }

    const Vector rp = it.tau * m.b - apply_a(m, it.x);
    BlockVector rd = scaled(m.c, it.tau);
    axpy(-1.0, apply_at(m, it.y), rd);
    axpy(-1.0, it.s, rd);
    const double rg = dot(m.c, it.x) - m.b.dot(it.y) + it.kappa;

    const int nrows = static_cast<int>(m.rows.size());
    auto apply_w_all = [&](const BlockVector& v) {
      BlockVector out(nb);
      for (std::size_t k = 0; k < nb; ++k) out[k] = apply_w(m.psd[k], sc[k], v[k]);
      return out;
    };
    // M_ij = <A_i, W A_j W> = <G^T A_i G, G^T A_j G>.
    std::vector<BlockVector> srows(nrows, BlockVector(nb));
    for (int i = 0; i < nrows; ++i)
      for (int k : m.row_support[i]) srows[i][k] = to_scaled_s(m.psd[k], sc[k], m.rows[i][k]);
    Matrix schur = Matrix::Zero(nrows, nrows);
    for (int i = 0; i < nrows; ++i) {
      for (int j = i; j < nrows; ++j) {
        double v = 0.0;
        for (int k : m.row_support[i]) {
          if (srows[j][k].size() == 0) continue;
          v += (srows[i][k].array() * srows[j][k].array()).sum();
        }
        schur(i, j) = v;
        schur(j, i) = v;
      }
    }
    SchurSolver normal;
    if (!normal.factor(schur)) return package(problem, m, best, best_meas, SolveStatus::kNumericalFail, iter);

    // Work with c' = c - A^T (y / tau). With dy = dy' + (y / tau) dtau the
    // Newton system keeps its form, and c' is small near optimality, which
    // avoids the cancellation in <c, W c W> - g^T M^{-1} g below.
    const Vector y_hat = it.y / it.tau;
    BlockVector c_shift = m.c;
    axpy(-1.0, apply_at(m, y_hat), c_shift);
    const BlockVector wcw = apply_w_all(c_shift);
    const Vector g = apply_a(m, wcw);
    const Vector u = normal.solve(g);
    const Vector v = normal.solve(m.b);
    const Vector q = u + v;
    const Vector bg = m.b - g;
    // <c', W c' W> - g^T M^{-1} g as the squared norm of a scaled residual.
    double proj = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      Matrix r = to_scaled_s(m.psd[k], sc[k], c_shift[k]);
      for (int i = 0; i < nrows; ++i)
        if (srows[i][k].size() != 0) r -= u(i) * srows[i][k];
      proj += r.squaredNorm();
    }
    const double denom_base = m.b.dot(v) + proj;

    // Solves the linearized system for right-hand sides (r1, r2, r3, rc, rtau):
    //   A dx - b dtau = r1,  A^T dy + ds - c dtau = r2,
    //   b^T dy - c^T dx - dkappa = r3,  lambda o (dx~ + ds~) = rc,
    //   kappa dtau + tau dkappa = rtau.
    auto solve_newton = [&](const Vector& r1, const BlockVector& r2, double r3,
                            const BlockVector& rc, double rtau) {
      Direction d;
      BlockVector rcx(nb);
      for (std::size_t k = 0; k < nb; ++k)
        rcx[k] = from_scaled(m.psd[k], sc[k], lambda_divide(m.psd[k], sc[k].lambda, rc[k]));
      BlockVector tmp = rcx;
      axpy(-1.0, apply_w_all(r2), tmp);
      const Vector p = normal.solve(r1 - apply_a(m, tmp));
      const double h3 = r3 + y_hat.dot(r1) + dot(c_shift, tmp) + rtau / it.tau;
      d.dtau = (h3 - bg.dot(p)) / (denom_base + it.kappa / it.tau);
      d.dy = p + q * d.dtau;
      d.ds = r2;
      axpy(-1.0, apply_at(m, d.dy), d.ds);
      axpy(d.dtau, c_shift, d.ds);
      d.dy += y_hat * d.dtau;
      d.dx = rcx;
      axpy(-1.0, apply_w_all(d.ds), d.dx);
      d.dkappa = (rtau - it.kappa * d.dtau) / it.tau;
      return d;
    };

    auto direction = [&](double eta, const BlockVector& rc, double rtau) {
      const Vector r1 = eta * rp;
      const BlockVector r2 = scaled(rd, eta);
      const double r3 = eta * rg;
      Direction d = solve_newton(r1, r2, r3, rc, rtau);
      for (int sweep = 0; sweep < 2; ++sweep) {
        const Vector e1 = r1 - (apply_a(m, d.dx) - d.dtau * m.b);
        BlockVector e2 = r2;
        axpy(-1.0, apply_at(m, d.dy), e2);
        axpy(-1.0, d.ds, e2);
        axpy(d.dtau, m.c, e2);
        const double e3 = r3 - (m.b.dot(d.dy) - dot(m.c, d.dx) - d.dkappa);
        BlockVector ec(nb);
        for (std::size_t k = 0; k < nb; ++k) {
          const Matrix sum = to_scaled_x(m.psd[k], sc[k], d.dx[k]) +
                             to_scaled_s(m.psd[k], sc[k], d.ds[k]);
          const Matrix lam = m.psd[k] ? Matrix(sc[k].lambda.asDiagonal()) : Matrix(sc[k].lambda);
          ec[k] = rc[k] - jordan(m.psd[k], lam, sum);
        }
        const double etau = rtau - (it.kappa * d.dtau + it.tau * d.dkappa);
        const Direction corr = solve_newton(e1, e2, e3, ec, etau);
        axpy(1.0, corr.dx, d.dx);
        axpy(1.0, corr.ds, d.ds);
        d.dy += corr.dy;
        d.dtau += corr.dtau;
        d.dkappa += corr.dkappa;
      }
      return d;
    };

    auto step_limit = [&](const Direction& d, std::vector<Matrix>& dxs, std::vector<Matrix>& dss) {
      double alpha = kInf;
      dxs.resize(nb);
      dss.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dxs[k] = to_scaled_x(m.psd[k], sc[k], d.dx[k]);
        dss[k] = to_scaled_s(m.psd[k], sc[k], d.ds[k]);
        alpha = std::min({alpha, max_step(m.psd[k], sc[k].lambda, dxs[k]),
                          max_step(m.psd[k], sc[k].lambda, dss[k])});
      }
      if (d.dtau < 0.0) alpha = std::min(alpha, -it.tau / d.dtau);
      if (d.dkappa < 0.0) alpha = std::min(alpha, -it.kappa / d.dkappa);
      return alpha;
    };

    // Predictor.
    BlockVector rc_aff(nb);
    for (std::size_t k = 0; k < nb; ++k) rc_aff[k] = -lambda_square(m.psd[k], sc[k].lambda);
    const Direction aff = direction(1.0, rc_aff, -it.tau * it.kappa);
    std::vector<Matrix> dxs_aff, dss_aff;
    const double alpha_aff = std::min(1.0, step_limit(aff, dxs_aff, dss_aff));

    double xs_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      const Matrix lam = m.psd[k] ? Matrix(sc[k].lambda.asDiagonal()) : Matrix(sc[k].lambda);
      xs_aff += ((lam + alpha_aff * dxs_aff[k]).array() * (lam + alpha_aff * dss_aff[k]).array()).sum();
    }
    const double mu_aff = (xs_aff + (it.tau + alpha_aff * aff.dtau) *
                                        (it.kappa + alpha_aff * aff.dkappa)) /
                          (nu + 1.0);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    BlockVector rc(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      const Matrix e = m.psd[k] ? Matrix(Matrix::Identity(m.size[k], m.size[k]))
                                : Matrix(Matrix::Ones(m.size[k], 1));
      rc[k] = sigma * mu * e - lambda_square(m.psd[k], sc[k].lambda) -
              jordan(m.psd[k], dxs_aff[k], dss_aff[k]);
    }
    const Direction dir =
        direction(1.0 - sigma, rc, sigma * mu - it.tau * it.kappa - aff.dtau * aff.dkappa);
    std::vector<Matrix> dxs, dss;
    double alpha = std::min(1.0, kStepFraction * step_limit(dir, dxs, dss));

    // Take the step in scaled space and refactor there; back off if rounding
    // pushed a block out of the cone.
    std::vector<ConeScaling> next(nb);
    bool accepted = false;
    for (int attempt = 0; attempt < 40 && alpha > 1e-12; ++attempt, alpha *= 0.7) {
      if (it.tau + alpha * dir.dtau <= 0.0 || it.kappa + alpha * dir.dkappa <= 0.0) continue;
      bool ok = true;
      for (std::size_t k = 0; k < nb && ok; ++k) {
        if (m.psd[k]) {
          auto updated = rescale_psd(sc[k], dxs[k], dss[k], alpha);
          if (updated) next[k] = std::move(*updated);
          else ok = false;
        } else {
          ok = ((it.x[k] + alpha * dir.dx[k]).array() > 0.0).all() &&
               ((it.s[k] + alpha * dir.ds[k]).array() > 0.0).all();
        }
      }
      if (ok) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return package(problem, m, best, best_meas, SolveStatus::kNumericalFail, iter);

    for (std::size_t k = 0; k < nb; ++k) {
      if (m.psd[k]) {
        sc[k] = std::move(next[k]);
        const auto lam = sc[k].lambda.asDiagonal();
        it.x[k] = sc[k].g * lam * sc[k].g.transpose();
        it.s[k] = sc[k].ginv.transpose() * lam * sc[k].ginv;
        it.x[k] = 0.5 * (it.x[k] + it.x[k].transpose()).eval();
        it.s[k] = 0.5 * (it.s[k] + it.s[k].transpose()).eval();
      } else {
        it.x[k] += alpha * dir.dx[k];
        it.s[k] += alpha * dir.ds[k];
        if (m.split[k]) reduce_drift(it.x[k], mu);
      }
    }
    it.y += alpha * dir.dy;
    it.tau += alpha * dir.dtau;
    it.kappa += alpha * dir.dkappa;
  }
}

}  // namespace deepsdp::conic
