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

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using deepsdp::cli::Command;
using deepsdp::cli::Format;

int main(int argc, char** argv) {
  CLI::App app{"DeepSDP safety verification for feed-forward ReLU networks"};
  app.require_subcommand(1);
  app.fallthrough();

  deepsdp::cli::RunConfig config;
  bool cuts = false;
  double tol = 0.0, rank_tol = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::string output;

  auto* cuts_opt = app.add_flag("--cuts", cuts, "Add the repeated-nonlinearity cuts");
  auto* tol_opt = app.add_option("--tol", tol, "Solver tolerance (default 1e-8)");
  auto* rank_opt = app.add_option("--rank-tol", rank_tol, "Relative eigenvalue cutoff for the numeric rank (default 1e-6)");
  auto* samples_opt = app.add_option("--samples", samples, "Soundness samples per direction (default 10000)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampling and the selftest instances (default 0)");
  app.add_option("--output", output, "Write the report here instead of stdout");
  const std::map<std::string, Format> formats{{"json", Format::kJson}, {"csv", Format::kCsv}};
  app.add_option("--format", config.format, "Report format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_flag("--verbose", config.verbose, "Write one JSON record per solver iteration to stderr");

  const std::pair<const char*, Command> commands[] = {
      {"verify", Command::kVerify},   {"oracle", Command::kOracle},
      {"compare", Command::kCompare}, {"analytic", Command::kAnalytic}};
  const char* help[] = {"Certified bound c^T y >= d* for every direction",
                        "Exact bound by activation-pattern enumeration",
                        "Bound, exact bound, condition flags and tightness verdict",
                        "Closed-form single-neuron bound"};
  std::string problem;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("problem", problem, "Problem file (JSON)")->required();
    sub->callback([&config, c = commands[i].second] { config.command = c; });
  }
  app.add_subcommand("selftest", "Run the acceptance suite; exit 0 iff every criterion passes")
      ->callback([&config] { config.command = Command::kSelftest; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : deepsdp::cli::kExitParseError;
  }

  config.problem_path = problem;
  if (cuts_opt->count() > 0) config.flags.cuts = cuts;
  if (tol_opt->count() > 0) config.flags.tol = tol;
  if (rank_opt->count() > 0) config.flags.rank_tol = rank_tol;
  if (samples_opt->count() > 0) config.flags.samples = samples;
  if (seed_opt->count() > 0) config.flags.seed = seed;

  if (output.empty()) {
    std::ostream* report = config.command == Command::kSelftest ? nullptr : &std::cout;
    return deepsdp::cli::run(config, report, config.command == Command::kSelftest ? std::cout : std::cerr);
  }
  std::ofstream file(output);
  if (!file) {
    std::cerr << "error: cannot write " << output << '\n';
    return deepsdp::cli::kExitParseError;
  }
  return deepsdp::cli::run(config, &file, config.command == Command::kSelftest ? std::cout : std::cerr);
}
