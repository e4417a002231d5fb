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

#ifndef HGRAPE_BENCH_HPP_
#define HGRAPE_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgrape/costs.hpp"
#include "hgrape/models.hpp"

namespace hgrape {

enum class Task { StateTransfer, Gate };
std::string_view to_string(Task task);

struct BenchRecord {
  std::string model;
  std::size_t d = 0;
  std::size_t N = 0;
  double tau = 0.0;
  double norm1 = 0.0;
  std::size_t sigma_prime = 0;
  long mu = 0;
  std::size_t kappa = 0;
  std::int64_t wall_ns = 0;
  std::size_t live_vector_peak = 0;
  // Empty on success; planning or evaluation failure otherwise.
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

// A = -i H(fixture amplitudes) dt. Records the plan of A at tolerance tau and
// the wall time of one e^A psi. Planning failure is stored in record.error.
BenchRecord measure_mu(const ModelParams& model, double dt, double tau);

struct RuntimeOptions {
  double dt = 1.0;
  std::size_t n_steps = 1;
  std::size_t reps = 5;
  bool warmup = true;
  Backend backend = Backend::ScalingSquaring;
  Storage storage = Storage::Sparse;
};

// Median wall time of one gradient evaluation with the fixture amplitudes held
// constant over opts.n_steps steps. State transfer: ground state to the
// 20-photon Fock state (or the top level for small models), plus a leakage
// penalty on the transmon-cavity model. Gate: Hadamard on every site for
// transmon and qubit models, identity otherwise.
BenchRecord measure_step_runtime(const ModelParams& model, Task task, double tau,
                                 const RuntimeOptions& opts = {});

// The problem measure_step_runtime times; exposed for tests and the CLI.
struct BenchProblem {
  ControlProblem problem;
  ControlField controls;
  std::vector<CostTerm> terms;
};
BenchProblem make_bench_problem(const ModelParams& model, Task task, double tau,
                                const RuntimeOptions& opts);

struct Point {
  double x;
  double y;
};

struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares on (log x, log y). Needs >= 4 points with x, y > 0.
PowerLawFit fit_power_law(std::span<const Point> points);
// Ordinary least squares; needs >= 4 points.
LinearFit fit_linear(std::span<const Point> points);

// model,d,N,tau,norm1,sigma_prime,mu,kappa,wall_ns,live_peak
void write_bench_csv(std::ostream& os, std::span<const BenchRecord> records,
                     bool include_wall = true);

// Strategy selection for choosing how to obtain gradients.
enum class KappaScaling { SubQuadratic, Quadratic };
enum class MuScaling { Sublinear, LinearOrWorse };
enum class Strategy { FullAD, SemiAD, HG_ScalingSquaring, HG_Diagonalization };

std::string_view to_string(KappaScaling v);
std::string_view to_string(MuScaling v);
std::string_view to_string(Strategy v);

struct StrategyInputs {
  std::size_t d = 0;
  std::size_t N = 0;
  KappaScaling kappa = KappaScaling::SubQuadratic;
  MuScaling mu = MuScaling::Sublinear;
  Task task = Task::StateTransfer;
  bool memory_budget_ok_for_ad = false;
  bool gradients_available = true;

  bool operator==(const StrategyInputs&) const = default;
};

struct StrategyRecommendation {
  Strategy method = Strategy::HG_ScalingSquaring;
  std::string rationale;
};

StrategyRecommendation strategy_advise(const StrategyInputs& in);

}  // namespace hgrape

#endif  // HGRAPE_BENCH_HPP_
