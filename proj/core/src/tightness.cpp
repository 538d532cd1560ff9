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

#include "deepsdp/tightness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deepsdp/errors.hpp"

namespace deepsdp {

namespace {

constexpr double kCornerTol = 1e-6;
constexpr double kVanishingGamma = 1e-7;

AssumptionCheck center_bias_check(const Vector& center, const Vector& bias) {
  const Vector margin = center + bias;
  const Eigen::Index n = margin.size();
  Eigen::Index worst = 0;
  for (Eigen::Index j = 1; j < n; ++j)
    if (margin(j) < margin(worst)) worst = j;
  const bool ok = margin(worst) >= 0.0;
  std::string detail = "min_j (xhat_j + b0_j) = " + std::to_string(margin(worst));
  if (n > 1) detail += " at j = " + std::to_string(worst);
  return {"center_above_negative_bias", ok, detail};
}

double pos(double v) { return std::max(v, 0.0); }

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertifiedTight: return "CERTIFIED_TIGHT";
    case Verdict::kNumericallyTight: return "NUMERICALLY_TIGHT";
    case Verdict::kGapDetected: return "GAP_DETECTED";
    case Verdict::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

Rank1Extraction extract_rank1(const SymMat& g, double rel_tol) {
  if (std::abs(g(0, 0) - 1.0) > kCornerTol)
    throw InvalidGram("Gram corner is " + std::to_string(g(0, 0)) + ", expected 1");
  const int n = g.dim() - 1;
  Rank1Extraction out;
  out.x = g.matrix().col(0).tail(n);
  out.gram_residual = (g.matrix().bottomRightCorner(n, n) - out.x * out.x.transpose()).norm();
  out.spectrum = linalg::eig_sym(g).values;
  out.rank = linalg::numeric_rank(out.spectrum, rel_tol);
  return out;
}

double collinearity_residual(const std::vector<Vector>& vectors, const Vector& e) {
  double worst = 0.0;
  for (const auto& u : vectors) worst = std::max(worst, u.norm() - std::abs(e.dot(u)));
  return worst;
}

double gram_collinearity(const SymMat& g) {
  const Matrix root = linalg::psd_sqrt(g);
  const Vector first = root.col(0);
  if (first.norm() == 0.0) return std::numeric_limits<double>::infinity();
  const Vector e = first.normalized();
  std::vector<Vector> cols;
  for (Eigen::Index k = 1; k < root.cols(); ++k) cols.emplace_back(root.col(k));
  return collinearity_residual(cols, e);
}

TwoStageValue phi_closed_form(const Vector& z, const Vector& e, double b0, double xhat) {
  if (xhat < -b0)
    throw ConditionNotMet("closed form needs xhat >= -b0, got xhat = " + std::to_string(xhat) +
                          ", b0 = " + std::to_string(b0));
  if (e.dot(z) < 0.0) throw ConditionNotMet("z violates e^T z >= 0");
  TwoStageValue out;
  out.argmin_u = z - b0 * e;
  out.phi_value = (z - (b0 + xhat) * e).squaredNorm();
  out.stage1_argmin_v = z;
  return out;
}

double phi_by_conic_solve(const Vector& z, const Vector& e, double b0, double xhat,
                          const conic::SolverOptions& opts) {
  const auto p = static_cast<int>(z.size());
  // Y = [[t, (u - xhat e)^T], [u - xhat e, I]] is PSD iff t >= ||u - xhat e||^2.
  const std::vector<conic::ConeBlock> blocks = {conic::ConeBlock::Psd(p + 1, "Y")};
  Matrix obj = Matrix::Zero(p + 1, p + 1);
  obj(0, 0) = 1.0;

  auto offdiag_row = [&](const Vector& a, double rhs) {
    Matrix m = Matrix::Zero(p + 1, p + 1);
    m.block(1, 0, p, 1) = 0.5 * a;
    m.block(0, 1, 1, p) = 0.5 * a.transpose();
    return conic::LinearRow{{m}, rhs};
  };

  std::vector<conic::LinearRow> eq;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      Matrix m = Matrix::Zero(p + 1, p + 1);
      m(1 + i, 1 + j) = i == j ? 1.0 : 0.5;
      m(1 + j, 1 + i) = m(1 + i, 1 + j);
      eq.push_back({{m}, i == j ? 1.0 : 0.0});
    }
  }
  std::vector<conic::LinearRow> ineq;
  ineq.push_back(offdiag_row(e, e.dot(z) - xhat - b0));
  if (z.squaredNorm() > 0.0)
    ineq.push_back(offdiag_row(-z, (xhat + b0) * e.dot(z) - z.squaredNorm()));

  const auto sol = conic::solve(conic::to_standard_form(blocks, {obj}, ineq, eq), opts);
  if (sol.status != conic::SolveStatus::kOptimal)
    throw ConditionNotMet("second-stage solve ended with " + conic::to_string(sol.status));
  return sol.primal_obj;
}

double single_neuron_analytic(const Interval& x, double b0, double c) {
  if (c != 1.0 && c != -1.0) throw InvalidInput("direction must be +1 or -1");
  if (x.center() < -b0)
    throw ConditionNotMet("single-neuron bound needs xhat >= -b0, got xhat = " +
                          std::to_string(x.center()) + ", b0 = " + std::to_string(b0));
  return c > 0 ? std::max(0.0, x.lo + b0) : -std::max(0.0, x.hi + b0);
}

TheoremCase select_case(const ReluNetwork& net, const InputSet& x) {
  if (std::holds_alternative<Ellipsoid>(x)) return TheoremCase::kEllipsoid;
  if (net.depth() == 1 && net.input_dim() == 1 && net.width(1) == 1 && net.output_dim() == 1 &&
      input_dim(x) == 1 && net.layer(0).w(0, 0) == 1.0 && net.layer(1).w(0, 0) == 1.0 &&
      net.layer(1).b(0) == 0.0)
    return TheoremCase::kSingleNeuron;
  return TheoremCase::kRectangle;
}

bool ConditionReport::all_hold() const {
  return std::all_of(flags.begin(), flags.end(), [](const auto& f) { return f.holds; });
}

std::optional<bool> ConditionReport::flag(const std::string& id) const {
  for (const auto& f : flags)
    if (f.id == id) return f.holds;
  return std::nullopt;
}

ConditionReport check_condition(const ReluNetwork& net, const InputSet& x,
                                const SafetySpec& spec, TheoremCase which, bool cuts) {
  ConditionReport r;
  r.which = which;
  r.flags = check_assumptions(net, x, spec, which, cuts);

  switch (which) {
    case TheoremCase::kSingleNeuron: {
      const Vector xhat = center(x);
      if (xhat.size() == 1) {
        r.flags.push_back(center_bias_check(xhat, net.layer(0).b));
      } else {
        r.flags.push_back({"center_above_negative_bias", false, "input is not one-dimensional"});
      }
      break;
    }
    case TheoremCase::kEllipsoid:
      break;
    case TheoremCase::kRectangle: {
      Rectangle box;
      if (const auto* iv = std::get_if<Interval>(&x)) {
        box = to_rectangle(*iv);
      } else if (const auto* rect = std::get_if<Rectangle>(&x)) {
        box = *rect;
      } else {
        r.flags.push_back({"center_above_negative_bias", false, "input is not a rectangle"});
        break;
      }
      try {
        const auto red = normalize_diagonal_weight(net, box);
        for (auto& f : r.flags) {
          if (f.id == "identity_first_layer" && !f.holds) {
            f.holds = true;
            f.detail = "W0 diagonal, reduced to I";
          }
        }
        r.flags.push_back(center_bias_check(red.input.center, red.net.layer(0).b));
      } catch (const NotReducible& e) {
        r.flags.push_back({"center_above_negative_bias", false, e.what()});
      }
      break;
    }
  }
  return r;
}

std::optional<SecondStageMultipliers> ellipsoid_multipliers(double gamma, const Vector& lambda_sdp,
                                                            const Vector& nu_sdp) {
  if (!(gamma > kVanishingGamma)) return std::nullopt;
  SecondStageMultipliers m;
  m.gamma = gamma;
  m.nu = 2.0 * nu_sdp / gamma;
  m.lambda = 2.0 * lambda_sdp / gamma;
  return m;
}

SecondStageSolution solve_second_stage(const Vector& v, const ReluNetwork& net, const Ellipsoid& x,
                                       const conic::SolverOptions& opts) {
  if (net.depth() != 1) throw InvalidInput("second stage is defined for single-layer networks");
  const Matrix& w = net.layer(0).w;
  const auto n = static_cast<int>(w.cols());
  const auto m = static_cast<int>(w.rows());
  if (v.size() != m || x.center.size() != n) throw InvalidInput("second stage: dimension mismatch");
  const Vector pre_center = w * x.center + net.layer(0).b;

  // Y = [[t, d^T], [d, I]] with d = u - xhat, so t >= ||d||^2.
  const std::vector<conic::ConeBlock> blocks = {conic::ConeBlock::Psd(n + 1, "Y")};
  Matrix obj = Matrix::Zero(n + 1, n + 1);
  obj(0, 0) = 1.0;
  auto d_row = [&](const Vector& a, double rhs) {
    Matrix coef = Matrix::Zero(n + 1, n + 1);
    coef.block(1, 0, n, 1) = 0.5 * a;
    coef.block(0, 1, 1, n) = 0.5 * a.transpose();
    return conic::LinearRow{{coef}, rhs};
  };
  std::vector<conic::LinearRow> eq;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Matrix coef = Matrix::Zero(n + 1, n + 1);
      coef(1 + i, 1 + j) = i == j ? 1.0 : 0.5;
      coef(1 + j, 1 + i) = coef(1 + i, 1 + j);
      eq.push_back({{coef}, i == j ? 1.0 : 0.0});
    }
  }
  // value: (W u + b)_i <= v_i.  either: v_i^2 <= v_i (W u + b)_i, dropped when v_i = 0.
  std::vector<conic::LinearRow> ineq;
  std::vector<int> either_of;
  for (int i = 0; i < m; ++i) ineq.push_back(d_row(w.row(i).transpose(), v(i) - pre_center(i)));
  for (int i = 0; i < m; ++i) {
    if (v(i) == 0.0) continue;
    ineq.push_back(d_row(-v(i) * w.row(i).transpose(), v(i) * pre_center(i) - v(i) * v(i)));
    either_of.push_back(i);
  }

  const auto sol = conic::solve(conic::to_standard_form(blocks, {obj}, ineq, eq), opts);
  SecondStageSolution out;
  out.status = sol.status;
  out.u = x.center + sol.primal[0].block(1, 0, n, 1);
  // The slack of LE row k has dual slack -y_k, the multiplier of that row.
  const Matrix& slack_dual = sol.dual_slack.back();
  out.multipliers.gamma = 0.0;
  out.multipliers.nu = slack_dual.col(0).head(m);
  out.multipliers.lambda = Vector::Zero(m);
  for (std::size_t k = 0; k < either_of.size(); ++k)
    out.multipliers.lambda(either_of[k]) = slack_dual(m + static_cast<Eigen::Index>(k), 0);
  return out;
}

double KktReport::max() const {
  return std::max({stationarity, complementarity_nu, complementarity_lambda, primal_feasibility,
                   dual_feasibility});
}

KktReport ellipsoid_kkt_check(const Vector& u, const Vector& v, const Vector& nu,
                              const Vector& lambda, const ReluNetwork& net, const Ellipsoid& x) {
  if (net.depth() != 1) throw InvalidInput("KKT check is defined for single-layer networks");
  const Matrix& w = net.layer(0).w;
  const Vector& b = net.layer(0).b;
  if (u.size() != w.cols() || v.size() != w.rows() || nu.size() != w.rows() ||
      lambda.size() != w.rows() || x.center.size() != w.cols())
    throw InvalidInput("KKT check: dimension mismatch");

  const Vector pre = w * u + b;
  KktReport r;
  const Vector grad = u - x.center + 0.5 * w.transpose() * nu -
                      0.5 * w.transpose() * lambda.cwiseProduct(v);
  r.stationarity = grad.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double value_gap = pre(i) - v(i);                   // <= 0
    const double either_gap = v(i) * v(i) - pre(i) * v(i);    // <= 0
    r.complementarity_nu = std::max(r.complementarity_nu, std::abs(nu(i) * value_gap));
    r.complementarity_lambda = std::max(r.complementarity_lambda, std::abs(lambda(i) * either_gap));
    r.primal_feasibility =
        std::max({r.primal_feasibility, pos(value_gap), pos(either_gap), pos(-v(i))});
    r.dual_feasibility = std::max({r.dual_feasibility, pos(-nu(i)), pos(-lambda(i))});
  }
  r.primal_feasibility = std::max(r.primal_feasibility, pos((u - x.center).norm() - x.radius));
  return r;
}

Vector project_to_input(const InputSet& x, const Vector& p) {
  if (const auto* iv = std::get_if<Interval>(&x))
    return Vector::Constant(1, std::clamp(p(0), iv->lo, iv->hi));
  if (const auto* r = std::get_if<Rectangle>(&x))
    return p.cwiseMax(r->center - r->radii).cwiseMin(r->center + r->radii);
  const auto& e = std::get<Ellipsoid>(x);
  const Vector d = p - e.center;
  const double n = d.norm();
  return n <= e.radius ? p : Vector(e.center + (e.radius / n) * d);
}

Purification purify(const SymMat& g, const ReluNetwork& net, const InputSet& x, const Vector& c,
                    double sdp_opt, double tol) {
  const int n0 = net.input_dim();
  std::vector<Vector> candidates;
  candidates.emplace_back(g.matrix().col(0).segment(1, n0));
  const auto ed = linalg::eig_sym(g);
  const Vector lead = ed.vectors.col(0);
  if (std::abs(lead(0)) > 1e-12) candidates.emplace_back(lead.segment(1, n0) / lead(0));

  Purification best;
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& cand : candidates) {
    const Vector x0 = project_to_input(x, cand);
    const double value = 2.0 * c.dot(forward(net, x0));
    const double err = std::abs(value - sdp_opt);
    if (err < best_err) {
      best_err = err;
      best.x0 = x0;
      best.lifted = lifted_point(net, x0);
      best.value = value;
    }
  }
  best.accepted = best_err <= tol * (1.0 + std::abs(sdp_opt));
  return best;
}

Verdict decide_verdict(bool conditions_hold, int rank, std::optional<double> oracle_gap,
                       double tol) {
  if (oracle_gap && *oracle_gap > 10.0 * tol) return Verdict::kGapDetected;
  if (conditions_hold && rank == 1) return Verdict::kCertifiedTight;
  if (rank == 1 || (oracle_gap && *oracle_gap <= tol)) return Verdict::kNumericallyTight;
  return Verdict::kUnknown;
}

TightnessReport analyze_tightness(const TightnessInput& in, const ReluNetwork& net,
                                  const InputSet& x, const Vector& c) {
  if (in.gram == nullptr) throw InvalidInput("analyze_tightness needs a Gram matrix");
  TightnessReport r;
  const auto ext = extract_rank1(*in.gram, in.rank_tol);
  r.eigen_spectrum = ext.spectrum;
  r.raw_rank = ext.rank;
  r.numeric_rank = ext.rank;
  r.extracted_x = ext.x;
  r.gram_residual = ext.gram_residual;
  r.collinearity = gram_collinearity(*in.gram);

  const double d_star = in.sdp_opt / 2.0;
  const double tol = 1e-6 * (1.0 + std::abs(d_star));
  if (ext.rank != 1) {
    const auto pur = purify(*in.gram, net, x, c, in.sdp_opt);
    if (pur.accepted) {
      r.purified = true;
      r.numeric_rank = 1;
      r.extracted_x = pur.lifted.tail(pur.lifted.size() - 1);
      r.gram_residual = 0.0;
      r.collinearity = 0.0;
    }
  }
  if (in.oracle_opt) r.oracle_gap = std::abs(d_star - *in.oracle_opt / 2.0);
  bool conditions = false;
  if (in.conditions) {
    r.condition_flags = in.conditions->flags;
    conditions = in.conditions->all_hold();
  }
  r.verdict = decide_verdict(conditions, r.numeric_rank, r.oracle_gap, tol);
  return r;
}

}  // namespace deepsdp
