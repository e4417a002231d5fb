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

#include "hgrape/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "hgrape/error.hpp"

namespace hgrape {
namespace {

using Clock = std::chrono::steady_clock;

double inf_norm(const Eigen::MatrixXd& g) { return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff(); }

struct Evaluation {
  GradientResult result;
  bool ok = false;
  std::string error;
};

Evaluation evaluate(const ControlProblem& problem, std::span<const CostTerm> terms,
                    const ControlField& a) {
  Evaluation e;
  try {
    e.result = composite_grad(problem, a, terms);
    if (!std::isfinite(e.result.cost) || !e.result.grad.allFinite()) {
      e.error = "non-finite cost or gradient";
      return e;
    }
    e.ok = true;
  } catch (const std::exception& ex) {
    e.error = ex.what();
  }
  return e;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw PreconditionError("optimizer: eta0 must be > 0");
  if (schedule == EtaSchedule::Backtracking) {
    if (!(shrink > 0.0 && shrink < 1.0)) throw PreconditionError("optimizer: shrink must be in (0, 1)");
    if (!(grow > 1.0) || !std::isfinite(grow)) throw PreconditionError("optimizer: grow must be > 1");
    if (max_backtracks == 0) throw PreconditionError("optimizer: max_backtracks must be >= 1");
  }
  if (!(stop_cost >= 0.0)) throw PreconditionError("optimizer: stop_cost must be >= 0");
  if (!(stop_grad_norm >= 0.0)) throw PreconditionError("optimizer: stop_grad_norm must be >= 0");
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::MaxIters: return "max_iters";
    case StopReason::CostReached: return "cost_reached";
    case StopReason::GradientReached: return "gradient_reached";
    case StopReason::LineSearchFailed: return "line_search_failed";
    case StopReason::EvaluationFailed: return "evaluation_failed";
  }
  return "unknown";
}

OptimizationTrace grape_optimize(const ControlProblem& problem, std::span<const CostTerm> terms,
                                 const ControlField& a0, const OptimizerConfig& cfg) {
  cfg.validate();
  a0.validate();
  if (a0.n_channels() != problem.channels()) {
    throw DimensionError("optimizer: initial controls have the wrong channel count");
  }

  const auto start = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  OptimizationTrace trace;
  trace.final_controls = a0;
  Evaluation current = evaluate(problem, terms, a0);
  if (!current.ok) {
    trace.reason = StopReason::EvaluationFailed;
    trace.error = current.error;
    return trace;
  }

  double eta = cfg.eta0;
  double eta_used = 0.0;
  for (std::size_t iter = 0;; ++iter) {
    const double gnorm = inf_norm(current.result.grad);
    trace.records.push_back({iter, current.result.cost, gnorm, eta_used, elapsed_ms()});
    if (current.result.cost <= cfg.stop_cost) {
      trace.reason = StopReason::CostReached;
      return trace;
    }
    if (gnorm <= cfg.stop_grad_norm) {
      trace.reason = StopReason::GradientReached;
      return trace;
    }
    if (iter == cfg.max_iters) {
      trace.reason = StopReason::MaxIters;
      return trace;
    }

    const ControlField& a = trace.final_controls;
    bool accepted = false;
    const std::size_t attempts = cfg.schedule == EtaSchedule::Constant ? 1 : cfg.max_backtracks;
    for (std::size_t t = 0; t < attempts; ++t) {
      ControlField trial(a.amplitudes - eta * current.result.grad, a.dt);
      Evaluation next = evaluate(problem, terms, trial);
      if (!next.ok) {
        trace.reason = StopReason::EvaluationFailed;
        trace.error = next.error;
        return trace;
      }
      if (cfg.schedule == EtaSchedule::Constant || next.result.cost <= current.result.cost) {
        eta_used = eta;
        trace.final_controls = std::move(trial);
        current = std::move(next);
        if (cfg.schedule == EtaSchedule::Backtracking) eta *= cfg.grow;
        accepted = true;
        break;
      }
      eta *= cfg.shrink;
    }
    if (!accepted) {
      trace.reason = StopReason::LineSearchFailed;
      return trace;
    }
  }
}

void write_trace_csv(std::ostream& os, const OptimizationTrace& trace, bool include_wall) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << "iter,cost,grad_inf_norm,eta,wall_ms\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : trace.records) {
    os << r.iter << ',' << r.cost << ',' << r.grad_inf_norm << ',' << r.eta_used << ','
       << (include_wall ? r.wall_ms : 0.0) << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace hgrape
