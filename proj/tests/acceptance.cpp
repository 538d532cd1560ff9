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

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is 0 only when every criterion passes.

#include <cstdlib>
#include <iostream>
#include <string>

#include "deepsdp/acceptance.hpp"

int main(int argc, char** argv) {
  deepsdp::AcceptanceOptions opts;
  if (argc > 1) opts.seed = std::stoull(argv[1]);

  const auto results = deepsdp::run_acceptance(opts);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << deepsdp::format_line(r) << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
