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

#include "hgrape/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <type_traits>

#include "hgrape/error.hpp"
#include "hgrape/expm.hpp"
#include "hgrape/instrument.hpp"

namespace hgrape {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t nanos_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

void check_points(std::span<const Point> points, const char* what) {
  if (points.size() < 4) throw PreconditionError(std::string(what) + ": needs >= 4 points");
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw PreconditionError(std::string(what) + ": non-finite data");
    }
  }
}

// Target level for state transfer: 20 photons in the cavity when it fits.
StateVector transfer_target(const ModelParams& params, std::size_t d) {
  if (const auto* p = std::get_if<TransmonCavityParams>(&params)) {
    const std::size_t dims[] = {p->d_transmon, p->d_cavity};
    const std::size_t levels[] = {0, std::min<std::size_t>(20, p->d_cavity - 1)};
    return product_state(dims, levels);
  }
  return StateVector::basis(d, d - 1);
}

DenseMatrix gate_target(const ModelParams& params, std::size_t d) {
  if (const auto* p = std::get_if<ThreeTransmonsParams>(&params)) {
    return hadamard_target(3, p->d_each);
  }
  if (const auto* p = std::get_if<QubitChainParams>(&params)) {
    return hadamard_target(p->n_qubits, 2);
  }
  return DenseMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

}  // namespace

std::string_view to_string(Task task) {
  return task == Task::StateTransfer ? "state_transfer" : "gate";
}

BenchRecord measure_mu(const ModelParams& params, double dt, double tau) {
  if (!(dt > 0.0)) throw PreconditionError("measure_mu: dt must be > 0");
  const Model model = build_model(params);
  const SparseComplexMatrix a = model.fixture_hamiltonian().scaled(Complex{0.0, -dt});

  BenchRecord r;
  r.model = model.name;
  r.d = model.dim();
  r.N = 1;
  r.tau = tau;
  r.norm1 = one_norm(a);
  r.sigma_prime = max_row_nnz(a);
  r.kappa = a.nnz();
  try {
    const ExpmPlan plan = plan_for(a, tau);
    r.mu = plan.mu;
    StateVector psi = StateVector::basis(r.d, 0);
    ExpmWorkspace ws(r.d);
    instrument::LiveVectorProbe probe;
    const auto t0 = Clock::now();
    apply_in_place(a, plan, psi, ws);
    r.wall_ns = nanos_since(t0);
    r.live_vector_peak = static_cast<std::size_t>(probe.peak());
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

BenchProblem make_bench_problem(const ModelParams& params, Task task, double tau,
                                const RuntimeOptions& opts) {
  if (opts.n_steps == 0) throw PreconditionError("bench: n_steps must be >= 1");
  Model model = build_model(params);
  const std::size_t d = model.dim();
  ControlProblem problem(model.drift, model.controls, opts.backend, tau, opts.storage);
  ControlField controls(opts.n_steps, model.controls.size(), opts.dt);
  for (std::size_t n = 0; n < opts.n_steps; ++n) {
    for (std::size_t k = 0; k < model.controls.size(); ++k) {
      controls(n, k) = model.fixture_amplitudes[k];
    }
  }

  std::vector<CostTerm> terms;
  if (task == Task::StateTransfer) {
    problem.initial_state = StateVector::basis(d, 0);
    terms.push_back(CostTerm::state_infidelity(transfer_target(params, d)));
    if (const auto* p = std::get_if<TransmonCavityParams>(&params)) {
      if (p->d_transmon > 2) {
        terms.push_back(CostTerm::state_penalty(transmon_leakage_projector(*p)));
      }
    }
  } else {
    terms.push_back(CostTerm::gate_infidelity(gate_target(params, d)));
  }
  return {std::move(problem), std::move(controls), std::move(terms)};
}

BenchRecord measure_step_runtime(const ModelParams& params, Task task, double tau,
                                 const RuntimeOptions& opts) {
  if (opts.reps == 0) throw PreconditionError("bench: reps must be >= 1");
  const BenchProblem bp = make_bench_problem(params, task, tau, opts);
  const std::size_t d = bp.problem.dim();

  BenchRecord r;
  r.model = std::string(model_name(params));
  r.d = d;
  r.N = opts.n_steps;
  r.tau = tau;
  r.kappa = opts.storage == Storage::Dense ? d * d : bp.problem.hamiltonian(bp.controls, 0).nnz();
  try {
    const StepPropagator step(bp.problem.step(bp.controls, 0), false);
    if (opts.backend == Backend::ScalingSquaring) {
      r.norm1 = step.plan().norm1;
      r.sigma_prime = step.plan().sigma_prime;
      r.mu = step.plan().mu;
    } else {
      const SparseComplexMatrix a = bp.problem.hamiltonian(bp.controls, 0).scaled(Complex{0.0, -opts.dt});
      r.norm1 = one_norm(a);
      r.sigma_prime = max_row_nnz(a);
    }
    if (opts.warmup) (void)composite_grad(bp.problem, bp.controls, bp.terms);
    std::vector<std::int64_t> times;
    for (std::size_t i = 0; i < opts.reps; ++i) {
      const auto t0 = Clock::now();
      const GradientResult g = composite_grad(bp.problem, bp.controls, bp.terms);
      times.push_back(nanos_since(t0));
      r.live_vector_peak = g.live_vector_peak;
    }
    std::sort(times.begin(), times.end());
    r.wall_ns = times[times.size() / 2];
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

PowerLawFit fit_power_law(std::span<const Point> points) {
  check_points(points, "fit_power_law");
  std::vector<Point> logs;
  logs.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.x > 0.0) || !(p.y > 0.0)) throw PreconditionError("fit_power_law: data must be > 0");
    logs.push_back({std::log(p.x), std::log(p.y)});
  }
  const LinearFit lin = fit_linear(logs);
  return {lin.slope, lin.intercept, lin.r_squared};
}

LinearFit fit_linear(std::span<const Point> points) {
  check_points(points, "fit_linear");
  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
    syy += (p.y - my) * (p.y - my);
  }
  if (!(sxx > 0.0)) throw PreconditionError("fit_linear: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double e = p.y - (fit.intercept + fit.slope * p.x);
    ss_res += e * e;
  }
  // A constant y is fitted exactly by a zero slope.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

void write_bench_csv(std::ostream& os, std::span<const BenchRecord> records, bool include_wall) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << "model,d,N,tau,norm1,sigma_prime,mu,kappa,wall_ns,live_peak\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : records) {
    os << r.model << ',' << r.d << ',' << r.N << ',' << r.tau << ',' << r.norm1 << ','
       << r.sigma_prime << ',' << r.mu << ',' << r.kappa << ',' << (include_wall ? r.wall_ns : 0)
       << ',' << r.live_vector_peak << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace hgrape
