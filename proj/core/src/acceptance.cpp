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

#include "deepsdp/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "deepsdp/errors.hpp"
#include "deepsdp/formulation.hpp"
#include "deepsdp/network.hpp"
#include "deepsdp/oracle.hpp"
#include "deepsdp/pipeline.hpp"
#include "deepsdp/tightness.hpp"

namespace deepsdp {

namespace {

using conic::ConeBlock;
using conic::ConicProblem;
using conic::LinearRow;
using conic::SolveStatus;

constexpr double kRelTol = 1e-6;
constexpr double kRankTol = 1e-6;

double rel_tol(double value) { return kRelTol * (1.0 + std::abs(value)); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

// One solved instance of criteria 1-3, 6 and 10.
struct Run {
  Run(ReluNetwork n, InputSet s, Vector dir) : net(std::move(n)), x(std::move(s)), c(std::move(dir)) {}

  ReluNetwork net;
  InputSet x;
  Vector c;
  bool primal_ok = false;
  bool dual_ok = false;
  double primal_d = 0.0;
  double dual_d = 0.0;
  RelaxationSolve solve;
  OracleResult oracle;
  ConditionReport conditions;
  TightnessReport tightness;
  double tol = 0.0;  // 1e-6 (1 + |d*|)
  std::string analysis_error;  // set when the tightness analysis rejected the solve

  bool solved() const { return primal_ok && dual_ok; }
  std::string unsolved_label() const {
    return std::string("unsolved (") + (dual_ok ? "" : "dual ") + (primal_ok ? "" : "primal ") +
           conic::to_string(dual_ok ? solve.primal.status : solve.dual.status) + ")";
  }
  double gap() const { return tightness.oracle_gap.value_or(std::numeric_limits<double>::infinity()); }
};

Run run_instance(ReluNetwork net, InputSet x, Vector c, const conic::SolverOptions& solver,
                 FormulationOptions form = {}) {
  Run r{std::move(net), std::move(x), std::move(c)};
  r.solve = solve_relaxation(r.net, r.x, r.c, form, solver);
  r.dual_ok = r.solve.dual_ok();
  r.primal_ok = r.solve.primal_ok();
  r.dual_d = r.solve.dual_d;
  r.primal_d = r.solve.primal_d;
  r.tol = rel_tol(r.dual_d);
  r.oracle = exact_minimize(r.net, r.x, r.c);
  r.conditions = check_condition(r.net, r.x, {{r.c}, {r.dual_d}}, select_case(r.net, r.x), form.cuts);
  if (!r.solved()) return r;

  TightnessInput in;
  in.gram = &r.solve.gram;
  in.sdp_opt = 2.0 * r.dual_d;
  in.oracle_opt = r.oracle.opt_value;
  in.conditions = &r.conditions;
  in.rank_tol = kRankTol;
  try {
    r.tightness = analyze_tightness(in, r.net, r.x, r.c);
  } catch (const Error& e) {
    r.analysis_error = e.what();
  }
  return r;
}

Vector uniform_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (auto& e : v) e = u(rng);
  return v;
}

Matrix uniform_mat(std::mt19937_64& rng, int rows, int cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (auto& e : m.reshaped()) e = u(rng);
  return m;
}

Vector unit_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vector v(n);
  do {
    for (auto& e : v) e = g(rng);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

ReluNetwork identity_output_net(const Matrix& w0, const Vector& b0) {
  const auto n1 = static_cast<int>(w0.rows());
  return ReluNetwork({{w0, b0}, {Matrix::Identity(n1, n1), Vector::Zero(n1)}});
}

// Tally of instances that miss a named check.
struct Misses {
  std::vector<std::pair<std::string, int>> counts;
  void add(const std::string& what) {
    for (auto& [k, v] : counts)
      if (k == what) {
        ++v;
        return;
      }
    counts.emplace_back(what, 1);
  }
  bool empty() const { return counts.empty(); }
  std::string str() const {
    std::string s;
    for (const auto& [k, v] : counts) s += (s.empty() ? "" : ", ") + k + " " + std::to_string(v);
    return s;
  }
};

CriterionResult finish(int id, std::string name, int total, const Misses& misses,
                       std::string extra = {}) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.passed = misses.empty() && total > 0;
  r.detail = std::to_string(total) + " instances";
  if (!misses.empty()) r.detail += "; misses: " + misses.str();
  if (!extra.empty()) r.detail += "; " + extra;
  return r;
}

CriterionResult single_neuron_tightness(std::mt19937_64& rng, const AcceptanceOptions& opts,
                                        std::vector<Run>& runs) {
  std::uniform_real_distribution<double> u(-3.0, 3.0), bias(-2.0, 2.0);
  Misses misses;
  const int total = 200;
  for (int t = 0; t < total; ++t) {
    double lo = 0.0, hi = 0.0, b0 = 0.0;
    do {
      lo = u(rng);
      hi = u(rng);
      b0 = bias(rng);
    } while (lo == hi || 0.5 * (lo + hi) < -b0);
    if (lo > hi) std::swap(lo, hi);
    const double c = rng() % 2 == 0 ? 1.0 : -1.0;
    Vector cv = Vector::Constant(1, c);
    ReluNetwork net({{Matrix::Ones(1, 1), Vector::Constant(1, b0)}, {Matrix::Ones(1, 1), Vector::Zero(1)}});
    const Interval box{lo, hi};
    runs.push_back(run_instance(std::move(net), box, cv, opts.solver));
    const Run& r = runs.back();
    if (!r.solved()) {
      misses.add(r.unsolved_label());
      continue;
    }
    if (!r.analysis_error.empty()) {
      misses.add("analysis error");
      continue;
    }
    if (r.gap() > r.tol) misses.add("oracle gap");
    if (r.tightness.numeric_rank != 1) misses.add("rank");
    if (r.tightness.gram_residual > 1e-5) misses.add("gram residual");
    if (std::abs(r.dual_d - single_neuron_analytic(box, b0, c)) > r.tol) misses.add("analytic");
  }
  return finish(1, "single-neuron tightness", total, misses);
}

CriterionResult ellipsoid_tightness(std::mt19937_64& rng, const AcceptanceOptions& opts,
                                    std::vector<Run>& runs) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_real_distribution<double> radius(0.1, 1.0);
  Misses misses;
  const int total = 100;
  int raw_rank1 = 0, held_with_gap = 0;
  for (int t = 0; t < total; ++t) {
    const int n = dim(rng);
    auto net = identity_output_net(uniform_mat(rng, n, n, -1, 1), uniform_vec(rng, n, -1, 1));
    const Ellipsoid ball{uniform_vec(rng, n, -1, 1), radius(rng)};
    runs.push_back(run_instance(std::move(net), ball, unit_direction(rng, n), opts.solver));
    const Run& r = runs.back();
    if (!r.solved()) {
      misses.add(r.unsolved_label());
      continue;
    }
    if (!r.analysis_error.empty()) {
      misses.add("analysis error");
      continue;
    }
    if (r.gap() > r.tol) misses.add("oracle gap");
    if (r.tightness.numeric_rank != 1) misses.add("rank");
    if (r.tightness.raw_rank == 1) ++raw_rank1;
    if (r.gap() > r.tol && r.conditions.all_hold()) ++held_with_gap;
  }
  return finish(2, "ellipsoid single-layer tightness", total, misses,
                "rank 1 before purification " + std::to_string(raw_rank1) +
                    "; gap with all conditions held " + std::to_string(held_with_gap));
}

CriterionResult rectangle_tightness(std::mt19937_64& rng, const AcceptanceOptions& opts,
                                    std::vector<Run>& runs) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  Misses misses;
  const int total = 100;
  int condition_held = 0, held_with_gap = 0;
  for (int t = 0; t < total; ++t) {
    const int n = dim(rng);
    Matrix w0 = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      double w = 0.0;
      while (std::abs(w) < 0.1) w = weight(rng);
      w0(i, i) = w;
    }
    auto net = identity_output_net(w0, uniform_vec(rng, n, -1, 1));
    const Rectangle box{uniform_vec(rng, n, -1, 1), uniform_vec(rng, n, 0.1, 1.0)};
    runs.push_back(run_instance(std::move(net), box, unit_direction(rng, n), opts.solver));
    const Run& r = runs.back();
    if (r.conditions.all_hold()) ++condition_held;
    if (!r.solved()) {
      misses.add(r.unsolved_label());
      continue;
    }
    if (!r.analysis_error.empty()) {
      misses.add("analysis error");
      continue;
    }
    if (r.gap() > r.tol) misses.add("oracle gap");
    if (r.tightness.numeric_rank != 1) misses.add("rank");
    if (r.gap() > r.tol && r.conditions.all_hold()) ++held_with_gap;
  }
  return finish(3, "rectangle single-layer tightness", total, misses,
                "all conditions held on " + std::to_string(condition_held) +
                    ", of which with a gap " + std::to_string(held_with_gap));
}

CriterionResult strong_duality(const std::vector<Run>& runs) {
  Misses misses;
  int compared = 0;
  double worst = 0.0;
  for (const auto& r : runs) {
    if (!r.solved()) continue;
    ++compared;
    const double gap = std::abs(r.primal_d - r.dual_d);
    worst = std::max(worst, gap / (1.0 + std::abs(r.primal_d)));
    if (gap > rel_tol(r.primal_d)) misses.add("duality gap");
  }
  return finish(4, "strong-duality consistency", compared, misses, "worst relative gap " + fmt(worst));
}

CriterionResult certificate_soundness(const std::vector<Run>& runs, const AcceptanceOptions& opts) {
  Misses misses;
  int checked = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const Run& r = runs[k];
    if (!r.dual_ok) continue;
    ++checked;
    std::mt19937_64 rng(opts.seed + 7919 * (k + 1));
    double lowest = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opts.soundness_samples; ++s) {
      const Vector x0 = sample_input(r.x, rng);
      lowest = std::min(lowest, 2.0 * (r.c.dot(forward(r.net, x0)) - r.dual_d));
    }
    worst = std::min(worst, lowest);
    if (lowest < -1e-6) misses.add("negative certificate form");
  }
  return finish(5, "certificate soundness", checked, misses, "smallest form " + fmt(worst));
}

CriterionResult cut_monotonicity(std::mt19937_64& rng, const AcceptanceOptions& opts) {
  std::uniform_int_distribution<int> dim(2, 3);
  std::uniform_real_distribution<double> radius(0.2, 1.0);
  Misses misses;
  const int total = 50;
  int tight = 0;
  double worst_drop = 0.0;
  for (int t = 0; t < total; ++t) {
    const int n = dim(rng);
    const auto net = identity_output_net(uniform_mat(rng, n, n, -1, 1), uniform_vec(rng, n, -1, 1));
    InputSet x;
    if (t % 2 == 0) {
      x = Ellipsoid{uniform_vec(rng, n, -1, 1), radius(rng)};
    } else {
      x = Rectangle{uniform_vec(rng, n, -1, 1), uniform_vec(rng, n, 0.1, 1.0)};
    }
    const Vector c = unit_direction(rng, n);
    const auto plain = run_instance(net, x, c, opts.solver);
    const auto cut = run_instance(net, x, c, opts.solver, FormulationOptions{true});
    if (!plain.dual_ok || !cut.dual_ok) {
      misses.add("unsolved");
      continue;
    }
    worst_drop = std::max(worst_drop, plain.dual_d - cut.dual_d);
    if (cut.dual_d < plain.dual_d - 1e-8) misses.add("cuts lowered the bound");
    if (plain.solved() && plain.gap() <= plain.tol) {
      ++tight;
      if (!cut.solved() || cut.gap() > cut.tol) misses.add("tightness lost");
    }
  }
  return finish(6, "cut monotonicity", total, misses,
                std::to_string(tight) + " tight without cuts; largest drop " + fmt(worst_drop));
}

CriterionResult closed_form_agreement(std::mt19937_64& rng, const AcceptanceOptions& opts) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.0, 2.0);
  Misses misses;
  const int total = 100;
  double worst = 0.0;
  for (int t = 0; t < total; ++t) {
    const int p = dim(rng);
    Vector z = uniform_vec(rng, p, -2, 2);
    z(0) = std::abs(z(0));
    const Vector e = Vector::Unit(p, 0);
    const double b0 = u(rng);
    const double xhat = -b0 + pos(rng);
    try {
      const double diff = std::abs(phi_closed_form(z, e, b0, xhat).phi_value -
                                   phi_by_conic_solve(z, e, b0, xhat, opts.solver));
      worst = std::max(worst, diff);
      if (diff > 1e-6) misses.add("disagreement");
    } catch (const ConditionNotMet&) {
      misses.add("unsolved");
    }
  }
  return finish(7, "closed-form agreement", total, misses, "largest difference " + fmt(worst));
}

CriterionResult kkt_residuals(const std::vector<Run>& runs, const AcceptanceOptions& opts) {
  // Multipliers come from the dual iterate and carry its error, so each
  // instance is re-solved at the tightest tolerance that still ends OPTIMAL.
  Misses misses;
  int checked = 0, from_dual = 0;
  double worst = 0.0;
  for (const auto& r : runs) {
    const auto* ball = std::get_if<Ellipsoid>(&r.x);
    if (ball == nullptr || !r.solved() || r.tightness.verdict != Verdict::kCertifiedTight) continue;
    ++checked;
    RelaxationSolve refined = r.solve;
    conic::SolverOptions fine = opts.solver;
    for (double factor : {100.0, 10.0}) {
      fine.tol = opts.solver.tol / factor;
      auto attempt = solve_relaxation(r.net, r.x, r.c, {}, fine);
      if (attempt.primal_ok() && attempt.dual_ok()) {
        refined = std::move(attempt);
        break;
      }
    }
    const int n0 = r.net.input_dim();
    const int n1 = r.net.num_neurons();
    Vector point = extract_rank1(refined.gram).x;
    if (r.tightness.purified) point = r.tightness.extracted_x;
    const Vector v = point.segment(n0, n1);

    KktReport rep;
    if (const auto mult = ellipsoid_multipliers(refined)) {
      ++from_dual;
      rep = ellipsoid_kkt_check(point.head(n0), v, mult->nu, mult->lambda, r.net, *ball);
    } else {
      const auto stage = solve_second_stage(v, r.net, *ball, fine);
      if (stage.status != SolveStatus::kOptimal) {
        misses.add("second stage " + conic::to_string(stage.status));
        continue;
      }
      rep = ellipsoid_kkt_check(stage.u, v, stage.multipliers.nu, stage.multipliers.lambda, r.net,
                                *ball);
    }
    worst = std::max(worst, rep.max());
    if (rep.max() > 1e-5) misses.add("residual");
  }
  auto res = finish(8, "KKT residuals", checked, misses,
                    "multipliers from the dual on " + std::to_string(from_dual) +
                        ", from the second stage on " + std::to_string(checked - from_dual) +
                        "; largest residual " + fmt(worst));
  if (checked == 0) res.detail += " (no certified ellipsoid instance)";
  return res;
}

Matrix sym_unit(int n, int i, int j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = e(j, i) = (i == j) ? 1.0 : 0.5;
  return e;
}

Matrix column(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

// min c^T x over ||x - center|| <= rho as the LMI [[rho I, x - center], [., rho]] >= 0.
std::pair<ConicProblem, double> ball_problem(const Vector& center, double rho, const Vector& c) {
  const auto n = static_cast<int>(center.size());
  ConicProblem p;
  p.blocks = {ConeBlock::Psd(n + 1, "Y")};
  Matrix obj = Matrix::Zero(n + 1, n + 1);
  obj.block(0, n, n, 1) = 0.5 * c;
  obj.block(n, 0, 1, n) = 0.5 * c.transpose();
  p.objective = {obj};
  for (int i = 0; i <= n; ++i)
    for (int j = i; j < n || (i == n && j == n); ++j)
      p.eq_constraints.push_back({{sym_unit(n + 1, i, j)}, i == j ? rho : 0.0});
  return {p, c.dot(center) - rho * c.norm()};
}

std::vector<std::pair<ConicProblem, double>> regression_problems() {
  std::vector<std::pair<ConicProblem, double>> out;
  {
    ConicProblem p;
    p.blocks = {ConeBlock::Psd(2)};
    p.objective = {Matrix::Identity(2, 2)};
    p.eq_constraints = {{{sym_unit(2, 0, 0)}, 1.0}};
    out.emplace_back(p, 1.0);
  }
  {
    ConicProblem p;
    p.blocks = {ConeBlock::Psd(2)};
    p.objective = {sym_unit(2, 0, 0)};
    p.eq_constraints = {{{Matrix(Matrix::Identity(2, 2))}, 1.0}};
    out.emplace_back(p, 0.0);
  }
  {
    ConicProblem p;
    p.blocks = {ConeBlock::Nonneg(2)};
    p.objective = {column({1, 0})};
    p.eq_constraints = {{{column({1, 1})}, 1.0}};
    out.emplace_back(p, 0.0);
  }
  {
    // max x1 + 2 x2 s.t. x1 + x2 <= 4, x1 + 3 x2 <= 6: vertex (3, 1).
    const std::vector<ConeBlock> blocks = {ConeBlock::Nonneg(2, "x")};
    out.emplace_back(conic::to_standard_form(blocks, {column({-1, -2})},
                                             {{{column({1, 1})}, 4.0}, {{column({1, 3})}, 6.0}}, {}),
                     -5.0);
  }
  {
    ConicProblem p;
    p.blocks = {ConeBlock::Free(1, "y"), ConeBlock::Nonneg(1, "x")};
    p.objective = {column({1}), column({0})};
    p.eq_constraints = {{{column({1}), column({-1})}, -2.0}};
    out.emplace_back(p, -2.0);
  }
  {
    Vector c(2);
    c << 1, 1;
    out.push_back(ball_problem(Vector::Zero(2), 1.0, c));
  }
  {
    // lambda_max([[2, 1], [1, 3]]) = min t s.t. t I - A >= 0.
    Matrix a(2, 2);
    a << 2, 1, 1, 3;
    ConicProblem p;
    p.blocks = {ConeBlock::Free(1, "t"), ConeBlock::Psd(2, "S")};
    p.objective = {column({1}), Matrix::Zero(2, 2)};
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j)
        p.eq_constraints.push_back(
            {{column({i == j ? -1.0 : 0.0}), sym_unit(2, i, j)}, -a(i, j)});
    out.emplace_back(p, (5.0 + std::sqrt(5.0)) / 2.0);
  }
  {
    // lambda_min by min <A, X> s.t. trace X = 1.
    Matrix a(3, 3);
    a << 4, 1, 0, 1, 3, 0, 0, 0, 5;
    ConicProblem p;
    p.blocks = {ConeBlock::Psd(3)};
    p.objective = {a};
    p.eq_constraints = {{{Matrix(Matrix::Identity(3, 3))}, 1.0}};
    out.emplace_back(p, (7.0 - std::sqrt(5.0)) / 2.0);
  }
  {
    // Two-node max-cut relaxation: min 2 X12 with unit diagonal.
    ConicProblem p;
    p.blocks = {ConeBlock::Psd(2)};
    p.objective = {sym_unit(2, 0, 1) * 2.0};
    p.eq_constraints = {{{sym_unit(2, 0, 0)}, 1.0}, {{sym_unit(2, 1, 1)}, 1.0}};
    out.emplace_back(p, -2.0);
  }
  {
    Vector center(3), c(3);
    center << 1, -1, 0.5;
    c << 1, 2, 2;
    out.push_back(ball_problem(center, 2.0, c));
  }
  return out;
}

CriterionResult solver_regression(const AcceptanceOptions& opts) {
  Misses misses;
  double worst = 0.0;
  const auto problems = regression_problems();
  for (const auto& [p, expected] : problems) {
    const auto sol = conic::solve(p, opts.solver);
    const double err = std::abs(sol.primal_obj - expected);
    worst = std::max(worst, err);
    if (sol.status != SolveStatus::kOptimal) misses.add("not optimal");
    else if (err > 1e-7) misses.add("error above 1e-7");
  }
  return finish(9, "solver regression", static_cast<int>(problems.size()), misses,
                "largest error " + fmt(worst));
}

CriterionResult negative_controls(std::mt19937_64& rng, const AcceptanceOptions& opts) {
  std::uniform_real_distribution<double> u(-3.0, 3.0), bias(-2.0, 2.0);
  std::uniform_int_distribution<int> dim(2, 3);
  Misses misses;
  const int total = 50;
  int certified = 0, numerically = 0, gaps = 0, unknown = 0;
  for (int t = 0; t < total; ++t) {
    auto make = [&]() -> Run {
    if (t < total / 2) {
      double lo = 0.0, hi = 0.0, b0 = 0.0;
      do {
        lo = u(rng);
        hi = u(rng);
        b0 = bias(rng);
      } while (lo == hi || 0.5 * (lo + hi) >= -b0);
      if (lo > hi) std::swap(lo, hi);
      const Vector c = Vector::Constant(1, rng() % 2 == 0 ? 1.0 : -1.0);
      ReluNetwork net({{Matrix::Ones(1, 1), Vector::Constant(1, b0)}, {Matrix::Ones(1, 1), Vector::Zero(1)}});
      return run_instance(std::move(net), Interval{lo, hi}, c, opts.solver);
    }
      const int n = dim(rng);
      Matrix w0 = uniform_mat(rng, n, n, -1, 1);
      for (int i = 0; i + 1 < n; ++i)
        if (std::abs(w0(i, i + 1)) < 0.2) w0(i, i + 1) = 0.5;
      auto net = identity_output_net(w0, uniform_vec(rng, n, -1, 1));
      const Rectangle box{uniform_vec(rng, n, -1, 1), uniform_vec(rng, n, 0.1, 1.0)};
      return run_instance(std::move(net), box, unit_direction(rng, n), opts.solver);
    };
    const Run r = make();
    if (r.conditions.all_hold()) misses.add("control satisfies the conditions");
    if (!r.solved()) {
      misses.add(r.unsolved_label());
      continue;
    }
    if (!r.analysis_error.empty()) {
      misses.add("analysis error");
      continue;
    }
    switch (r.tightness.verdict) {
      case Verdict::kCertifiedTight:
        ++certified;
        misses.add("certified");
        break;
      case Verdict::kGapDetected:
        ++gaps;
        if (!(r.gap() > 10.0 * r.tol)) misses.add("unconfirmed gap");
        break;
      case Verdict::kNumericallyTight: ++numerically; break;
      case Verdict::kUnknown: ++unknown; break;
    }
  }
  return finish(10, "negative-control honesty", total, misses,
                "verdicts: certified " + std::to_string(certified) + ", numerically tight " +
                    std::to_string(numerically) + ", gap " + std::to_string(gaps) + ", unknown " +
                    std::to_string(unknown));
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<Run> tightness_runs;
  auto rng_for = [&](int id) { return std::mt19937_64(opts.seed * 1000003 + id); };
  std::vector<std::function<CriterionResult()>> criteria = {
      [&] { auto rng = rng_for(1); return single_neuron_tightness(rng, opts, tightness_runs); },
      [&] { auto rng = rng_for(2); return ellipsoid_tightness(rng, opts, tightness_runs); },
      [&] { auto rng = rng_for(3); return rectangle_tightness(rng, opts, tightness_runs); },
      [&] { return strong_duality(tightness_runs); },
      [&] { return certificate_soundness(tightness_runs, opts); },
      [&] { auto rng = rng_for(6); return cut_monotonicity(rng, opts); },
      [&] { auto rng = rng_for(7); return closed_form_agreement(rng, opts); },
      [&] { return kkt_residuals(tightness_runs, opts); },
      [&] { return solver_regression(opts); },
      [&] { auto rng = rng_for(10); return negative_controls(rng, opts); },
  };
  std::vector<CriterionResult> out;
  for (auto& run : criteria) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.id = static_cast<int>(out.size()) + 1;
      r.name = "criterion " + std::to_string(r.id);
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.id == 9 && r.seconds >= 5.0) {
      r.passed = false;
      r.detail += "; over the 5 s budget";
    }
    if (opts.log) *opts.log << format_line(r) << '\n' << std::flush;
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << ' ' << std::setw(2) << r.id << ' ' << r.name << ": "
     << r.detail << " (" << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

}  // namespace deepsdp
