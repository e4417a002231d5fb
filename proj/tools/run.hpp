// Copyright 2026 The hgrape Authors
//
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

#ifndef HGRAPE_TOOLS_RUN_HPP_
#define HGRAPE_TOOLS_RUN_HPP_

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "config.hpp"
#include "hgrape/costs.hpp"

namespace hgrape::cli {

// The optimization problem described by a config.
struct ProblemSetup {
  ControlProblem problem;
  std::vector<CostTerm> terms;
  ControlField initial_controls;
};
ProblemSetup build_problem(const RunConfig& config);

struct RunOptions {
  std::filesystem::path out_dir;  // empty: no files (advise / expm only)
  bool include_wall = true;       // false writes 0 in wall-time columns
};

// Executes the command. Results go to files under out_dir; advise and expm
// also print JSON to `out`. Returns the process exit status; failures are
// reported on `err` with context.
int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace hgrape::cli

#endif  // HGRAPE_TOOLS_RUN_HPP_
