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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "deepsdp/acceptance.hpp"
#include "deepsdp/errors.hpp"
#include "deepsdp/pipeline.hpp"

namespace deepsdp::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

VerifyOptions verify_options(const RunOptions& opts, std::ostream* trace) {
  VerifyOptions v;
  v.formulation.cuts = opts.cuts;
  v.solver.tol = opts.tol;
  v.solver.trace = trace;
  v.rank_tol = opts.rank_tol;
  v.samples = opts.samples;
  v.seed = opts.seed;
  return v;
}

json config_json(Command command, const RunOptions& opts) {
  return {{"command", to_string(command)}, {"cuts", opts.cuts},       {"tol", opts.tol},
          {"rank_tol", opts.rank_tol},      {"samples", opts.samples}, {"seed", opts.seed}};
}

json direction_json(const DirectionResult& r) {
  return {{"index", r.index},
          {"c", to_json(r.c)},
          {"d_star", number(r.d_star)},
          {"primal_obj", number(r.primal_obj)},
          {"dual_obj", number(r.dual_obj)},
          {"gap", number(r.gap)},
          {"primal_status", conic::to_string(r.solve.primal.status)},
          {"dual_status", conic::to_string(r.solve.dual.status)},
          {"primal_iterations", r.primal_iterations},
          {"dual_iterations", r.dual_iterations},
          {"min_certificate_form", number(r.min_certificate_form)},
          {"sound", r.sound}};
}

json pattern_json(const std::vector<bool>& pattern) {
  json out = json::array();
  for (bool b : pattern) out.push_back(b ? 1 : 0);
  return out;
}

json oracle_json(const OracleResult& o) {
  return {{"oracle", number(o.opt_value / 2.0)},
          {"oracle_status", to_string(o.status)},
          {"argmin_x0", to_json(o.argmin_x0)},
          {"pattern", pattern_json(o.pattern)},
          {"subproblems_solved", o.subproblems_solved},
          {"infeasible_patterns", o.infeasible_patterns},
          {"unsettled_patterns", o.unsettled_patterns}};
}

json kkt_json(const std::optional<KktReport>& k) {
  if (!k) return nullptr;
  return {{"stationarity", number(k->stationarity)},
          {"complementarity_nu", number(k->complementarity_nu)},
          {"complementarity_lambda", number(k->complementarity_lambda)},
          {"primal_feasibility", number(k->primal_feasibility)},
          {"dual_feasibility", number(k->dual_feasibility)},
          {"max", number(k->max())}};
}

json tightness_json(int index, const Comparison& cmp) {
  json flags = json::array();
  for (const auto& f : cmp.conditions.flags)
    flags.push_back({{"id", f.id}, {"holds", f.holds}, {"detail", f.detail}});
  const auto& t = cmp.tightness;
  return {{"index", index},
          {"case", to_string(cmp.conditions.which)},
          {"conditions", flags},
          {"conditions_hold", cmp.conditions.all_hold()},
          {"eigen_spectrum", to_json(t.eigen_spectrum)},
          {"raw_rank", t.raw_rank},
          {"numeric_rank", t.numeric_rank},
          {"purified", t.purified},
          {"extracted_x", to_json(t.extracted_x)},
          {"gram_residual", number(t.gram_residual)},
          {"collinearity", number(t.collinearity)},
          {"oracle_gap", t.oracle_gap ? number(*t.oracle_gap) : json(nullptr)},
          {"verdict", to_string(t.verdict)},
          {"kkt", kkt_json(cmp.kkt)}};
}

// The closed form covers y = max(0, x + b0) on an interval.
Interval single_neuron_interval(const Problem& p) {
  const auto& net = p.net;
  const bool shape = net.depth() == 1 && net.input_dim() == 1 && net.width(1) == 1 &&
                     net.output_dim() == 1 && net.layer(0).w(0, 0) == 1.0 &&
                     net.layer(1).w(0, 0) == 1.0 && net.layer(1).b(0) == 0.0;
  if (!shape)
    throw ParseError("analytic needs a single neuron y = max(0, x + b) with unit weights");
  if (const auto* iv = std::get_if<Interval>(&p.input)) return *iv;
  if (const auto* r = std::get_if<Rectangle>(&p.input)) return to_interval(*r);
  throw ParseError("analytic needs an interval input");
}

std::string csv_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return "";
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  std::ostringstream os;
  os << std::setprecision(17) << v.get<double>();
  return os.str();
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::kVerify:
      return "verify";
    case Command::kOracle:
      return "oracle";
    case Command::kCompare:
      return "compare";
    case Command::kAnalytic:
      return "analytic";
    case Command::kSelftest:
      return "selftest";
  }
  return "unknown";
}

std::string to_string(Format f) { return f == Format::kCsv ? "csv" : "json"; }

json build_report(Command command, const Problem& problem, const RunOptions& opts,
                  std::ostream* trace) {
  const auto start = Clock::now();
  json report;
  report["config"] = config_json(command, opts);
  report["config"]["input_set"] = to_json(problem.input);
  report["config"]["network"] = to_json(problem.net);
  json results = json::array();
  json tightness = json::array();
  json per_direction = json::array();

  const auto vopts = verify_options(opts, trace);
  OracleOptions oopts;
  oopts.solver.tol = opts.tol;

  for (std::size_t k = 0; k < problem.directions.size(); ++k) {
    const auto t0 = Clock::now();
    const int index = static_cast<int>(k);
    const Vector& c = problem.directions[k];
    switch (command) {
      case Command::kVerify:
        results.push_back(direction_json(verify_direction(problem.net, problem.input, c, index, vopts)));
        break;
      case Command::kOracle: {
        json row = {{"index", index}, {"c", to_json(c)}};
        row.update(oracle_json(exact_minimize(problem.net, problem.input, c, oopts)));
        results.push_back(row);
        break;
      }
      case Command::kCompare: {
        const auto cmp = compare_direction(problem.net, problem.input, c, index, vopts, oopts);
        json row = direction_json(cmp.sdp);
        row.update(oracle_json(cmp.oracle));
        row["verdict"] = to_string(cmp.tightness.verdict);
        results.push_back(row);
        tightness.push_back(tightness_json(index, cmp));
        break;
      }
      case Command::kAnalytic: {
        const Interval x = single_neuron_interval(problem);
        if (std::abs(c(0)) != 1.0) throw ParseError("analytic needs directions +1 or -1");
        json row = {{"index", index}, {"c", to_json(c)}};
        try {
          row["analytic"] = number(single_neuron_analytic(x, problem.net.layer(0).b(0), c(0)));
        } catch (const ConditionNotMet& e) {
          row["analytic"] = nullptr;
          row["note"] = e.what();
        }
        results.push_back(row);
        break;
      }
      case Command::kSelftest:
        throw ParseError("selftest takes no problem file");
    }
    per_direction.push_back(seconds_since(t0));
  }

  report["results"] = results;
  report["tightness"] = tightness;
  report["timings"] = {{"total_seconds", seconds_since(start)}, {"directions", per_direction}};
  return report;
}

std::string to_csv(const json& report) {
  std::ostringstream os;
  os << "index,d_star,primal_obj,dual_obj,gap,oracle,verdict\n";
  for (const auto& r : report.at("results")) {
    os << csv_field(r, "index") << ',' << csv_field(r, "d_star") << ','
       << csv_field(r, "primal_obj") << ',' << csv_field(r, "dual_obj") << ','
       << csv_field(r, "gap") << ',';
    // The analytic command reports its closed form in the oracle column.
    os << (r.contains("analytic") ? csv_field(r, "analytic") : csv_field(r, "oracle")) << ','
       << csv_field(r, "verdict") << '\n';
  }
  return os.str();
}

namespace {

RunOptions merged_options(const RunConfig& config, RunOptions opts) {
  const auto& f = config.flags;
  if (f.cuts) opts.cuts = *f.cuts;
  if (f.tol) opts.tol = *f.tol;
  if (f.rank_tol) opts.rank_tol = *f.rank_tol;
  if (f.samples) opts.samples = *f.samples;
  if (f.seed) opts.seed = *f.seed;
  validate(opts);
  return opts;
}

int run_selftest(const RunConfig& config, std::ostream* report, std::ostream& log) {
  const auto opts = merged_options(config, {});
  AcceptanceOptions a;
  a.seed = opts.seed;
  a.solver.tol = opts.tol;
  a.soundness_samples = opts.samples;
  if (config.verbose) a.solver.trace = &log;

  const auto start = Clock::now();
  const auto results = run_acceptance(a);
  json rows = json::array();
  json seconds = json::array();
  bool all = true;
  for (const auto& r : results) {
    log << format_line(r) << '\n';
    all = all && r.passed;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    seconds.push_back(r.seconds);
  }
  if (report != nullptr) {
    if (config.format == Format::kCsv) {
      *report << "id,name,passed\n";
      for (const auto& r : results)
        *report << r.id << ',' << r.name << ',' << (r.passed ? "true" : "false") << '\n';
    } else {
      json out;
      out["config"] = config_json(Command::kSelftest, opts);
      out["results"] = rows;
      out["tightness"] = json::array();
      out["timings"] = {{"total_seconds", seconds_since(start)}, {"criteria", seconds}};
      *report << out.dump(2) << '\n';
    }
  }
  return all ? kExitOk : kExitSolverFailure;
}

}  // namespace

int run(const RunConfig& config, std::ostream* report, std::ostream& log) {
  try {
    if (config.command == Command::kSelftest) return run_selftest(config, report, log);

    const Problem problem = load_problem(config.problem_path);
    const auto opts = merged_options(config, problem.options);
    json out = build_report(config.command, problem, opts, config.verbose ? &log : nullptr);
    out["config"]["problem"] = config.problem_path.string();
    if (report != nullptr) {
      if (config.format == Format::kCsv) {
        *report << to_csv(out);
      } else {
        *report << out.dump(2) << '\n';
      }
    }
    return kExitOk;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const SolverFailure& e) {
    log << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const EmptyInput& e) {
    log << "oracle failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const deepsdp::Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitParseError;
  }
}

}  // namespace deepsdp::cli
