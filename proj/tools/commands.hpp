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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "problem_io.hpp"

namespace deepsdp::cli {

enum class Command { kVerify, kOracle, kCompare, kAnalytic, kSelftest };
enum class Format { kJson, kCsv };

std::string to_string(Command c);
std::string to_string(Format f);

/// Flags given on the command line; unset ones fall back to the problem file
/// and then to the RunOptions defaults.
struct Overrides {
  std::optional<bool> cuts;
  std::optional<double> tol;
  std::optional<double> rank_tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  Command command = Command::kVerify;
  std::filesystem::path problem_path;
  Overrides flags;
  Format format = Format::kJson;
  bool verbose = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitParseError = 2;

/// Runs one command. The report goes to `report` (for selftest only when
/// `report` is non-null); diagnostics, solver traces and the selftest lines go
/// to `log`. Returns the process exit code.
int run(const RunConfig& config, std::ostream* report, std::ostream& log);

/// Report for an already parsed problem. Throws SolverFailure and the other
/// library errors unchanged.
nlohmann::json build_report(Command command, const Problem& problem, const RunOptions& opts,
                            std::ostream* trace = nullptr);

/// One row per direction: index,d_star,primal_obj,dual_obj,gap,oracle,verdict.
/// Fields a command does not produce are left empty.
std::string to_csv(const nlohmann::json& report);

}  // namespace deepsdp::cli
