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

#ifndef HGRAPE_OPTIMIZER_HPP_
#define HGRAPE_OPTIMIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgrape/costs.hpp"

namespace hgrape {

enum class EtaSchedule {
  Constant,      // a <- a - eta0 grad, every step accepted
  Backtracking,  // shrink eta until the cost does not increase, grow after success
};

struct OptimizerConfig {
  std::size_t max_iters = 200;
  double eta0 = 1.0;
  EtaSchedule schedule = EtaSchedule::Backtracking;
  double shrink = 0.5;
  double grow = 1.1;
  double stop_cost = 0.0;
  double stop_grad_norm = 0.0;
  std::uint64_t seed = 0;
  // Trial steps per iteration before the line search gives up.
  std::size_t max_backtracks = 60;

  void validate() const;
  bool operator==(const OptimizerConfig&) const = default;
};

enum class StopReason { MaxIters, CostReached, GradientReached, LineSearchFailed, EvaluationFailed };
std::string_view to_string(StopReason reason);

struct IterationRecord {
  std::size_t iter = 0;
  double cost = 0.0;
  double grad_inf_norm = 0.0;
  double eta_used = 0.0;  // step that produced this iterate, 0 for the start
  double wall_ms = 0.0;   // since the optimization started
};

struct OptimizationTrace {
  std::vector<IterationRecord> records;
  ControlField final_controls;
  StopReason reason = StopReason::MaxIters;
  std::string error;  // set when reason == EvaluationFailed
};

// Steepest descent on the weighted cost. Iteration 0 records the starting
// point; at most cfg.max_iters updates follow.
OptimizationTrace grape_optimize(const ControlProblem& problem, std::span<const CostTerm> terms,
                                 const ControlField& a0, const OptimizerConfig& cfg);

// Header iter,cost,grad_inf_norm,eta,wall_ms. With include_wall = false the
// wall_ms column is written as 0 so reruns compare byte for byte.
void write_trace_csv(std::ostream& os, const OptimizationTrace& trace, bool include_wall = true);

}  // namespace hgrape

#endif  // HGRAPE_OPTIMIZER_HPP_
