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

#include "hgrape/costs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "hgrape/error.hpp"
#include "hgrape/instrument.hpp"

namespace hgrape {
namespace {

constexpr double kNormTol = 1e-10;
constexpr double kUnitaryTol = 1e-10;
constexpr double kHermitianTol = 1e-12;
constexpr double kBasisTol = 1e-10;

void check_state(const StateVector& v, std::size_t dim, const char* what) {
  if (v.dim() != dim) throw DimensionError(std::string(what) + ": dimension mismatch");
  if (std::abs(v.norm() - 1.0) > kNormTol) {
    throw PreconditionError(std::string(what) + ": state is not normalized");
  }
}

void check_field(const ControlProblem& p, const ControlField& a) {
  a.validate();
  if (a.n_channels() != p.channels()) {
    throw DimensionError("control field has " + std::to_string(a.n_channels()) +
                         " channels, problem has " + std::to_string(p.channels()));
  }
}

// ---------------------------------------------------------------------------
// State transfer: every term keeps one backward vector, all driven by the
// same psi trajectory.

struct StateAccumulator {
  const CostTerm* term;
  StateVector back;
  Complex overlap = 0.0;  // <psi_N|phi_T>, infidelity only
  double running = 0.0;
  double cost = 0.0;
};

GradientResult evaluate_state_terms(const ControlProblem& p, const ControlField& a,
                                    const StateVector& psi0,
                                    std::span<const CostTerm* const> terms) {
  check_field(p, a);
  check_state(psi0, p.dim(), "initial state");
  for (const auto* t : terms) t->validate(p.dim());

  instrument::LiveVectorProbe probe;
  const std::size_t n_steps = a.n_steps();
  const double inv_n = 1.0 / static_cast<double>(n_steps);

  std::vector<StateAccumulator> acc;
  acc.reserve(terms.size());
  for (const auto* t : terms) acc.push_back({t, StateVector(), 0.0, 0.0, 0.0});

  StateVector psi(psi0);
  for (std::size_t n = 0; n < n_steps; ++n) {
    const StepPropagator step(p.step(a, n), false);
    step.forward(psi);
    for (auto& s : acc) {
      if (s.term->kind == CostKind::StatePenalty) {
        s.running += inner(psi, matvec(*s.term->penalty, psi)).real();
      } else if (s.term->kind == CostKind::StateRunningInfidelity) {
        s.running += std::norm(inner(*s.term->target_state, psi));
      }
    }
  }

  for (auto& s : acc) {
    switch (s.term->kind) {
      case CostKind::StateInfidelity:
        s.overlap = inner(psi, *s.term->target_state);
        s.cost = 1.0 - std::norm(s.overlap);
        s.back = *s.term->target_state;
        break;
      case CostKind::StatePenalty:
        s.cost = s.running * inv_n;
        s.back = matvec(*s.term->penalty, psi);
        break;
      case CostKind::StateRunningInfidelity:
        s.cost = 1.0 - s.running * inv_n;
        s.back = inner(*s.term->target_state, psi) * *s.term->target_state;
        break;
      default:
        throw PreconditionError("state evaluator received a gate term");
    }
  }

  GradientResult result;
  result.grad = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_steps),
                                      static_cast<Eigen::Index>(p.channels()));
  for (std::size_t n = n_steps; n-- > 0;) {
    const StepPropagator step(p.step(a, n), true);
    step.backward(psi);  // psi_{n-1} in one-based step numbering
    for (std::size_t k = 0; k < p.channels(); ++k) {
      const StateVector dpsi = step.derivative(k, psi);
      double g = 0.0;
      for (const auto& s : acc) {
        const Complex overlap = inner(s.back, dpsi);
        double contrib = 0.0;
        switch (s.term->kind) {
          case CostKind::StateInfidelity:
            contrib = -2.0 * (overlap * s.overlap).real();
            break;
          case CostKind::StatePenalty:
            contrib = 2.0 * inv_n * overlap.real();
            break;
          default:
            contrib = -2.0 * inv_n * overlap.real();
            break;
        }
        g += s.term->weight * contrib;
      }
      result.grad(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = g;
    }
    if (n == 0) break;
    for (auto& s : acc) {
      step.backward(s.back);
      if (s.term->kind == CostKind::StatePenalty) {
        s.back += matvec(*s.term->penalty, psi);
      } else if (s.term->kind == CostKind::StateRunningInfidelity) {
        axpy(inner(*s.term->target_state, psi), *s.term->target_state, s.back);
      }
    }
  }

  for (const auto& s : acc) result.cost += s.term->weight * s.cost;
  result.live_vector_peak = probe.peak();
  return result;
}

// ---------------------------------------------------------------------------
// Gate operation: basis states are processed in groups. Scaling and squaring
// uses groups of one (O(1) live vectors); diagonalization takes the whole
// basis at once so every step is factorized a single time.

void check_basis(std::span<const StateVector> basis, std::size_t d) {
  if (basis.size() != d) throw PreconditionError("basis must contain exactly d states");
  for (std::size_t i = 0; i < d; ++i) {
    if (basis[i].dim() != d) throw DimensionError("basis state dimension mismatch");
    for (std::size_t j = i; j < d; ++j) {
      const Complex g = inner(basis[i], basis[j]);
      const Complex expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - expected) > kBasisTol) throw PreconditionError("basis is not orthonormal");
    }
  }
}

class BasisSource {
 public:
  BasisSource(std::span<const StateVector> basis, std::size_t d) : d_(d), given_(basis) {
    if (!given_.empty()) check_basis(given_, d);
  }
  StateVector operator[](std::size_t h) const {
    return given_.empty() ? StateVector::basis(d_, h) : given_[h];
  }

 private:
  std::size_t d_;
  std::span<const StateVector> given_;
};

std::size_t group_size(const ControlProblem& p) {
  return p.backend == Backend::Diagonalization ? p.dim() : 1;
}

StateVector apply_target(const DenseMatrix& u, const StateVector& v) { return matvec(u, v); }

void forward_group(const ControlProblem& p, const ControlField& a, std::vector<StateVector>& psi,
                   const std::vector<StateVector>* phi0, std::vector<Complex>* traces) {
  for (std::size_t n = 0; n < a.n_steps(); ++n) {
    const StepPropagator step(p.step(a, n), false);
    for (std::size_t g = 0; g < psi.size(); ++g) {
      step.forward(psi[g]);
      if (traces != nullptr) (*traces)[n] += inner((*phi0)[g], psi[g]);
    }
  }
}

void check_gate(const ControlProblem& p, const ControlField& a, const DenseMatrix& target) {
  check_field(p, a);
  if (static_cast<std::size_t>(target.rows()) != p.dim() ||
      static_cast<std::size_t>(target.cols()) != p.dim()) {
    throw DimensionError("target gate dimension mismatch");
  }
  if (!is_unitary(target, kUnitaryTol)) throw PreconditionError("target gate is not unitary");
}

}  // namespace

// ---------------------------------------------------------------------------

ControlField::ControlField(std::size_t n_steps, std::size_t n_channels, double dt_)
    : amplitudes(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_steps),
                                       static_cast<Eigen::Index>(n_channels))),
      dt(dt_) {}

ControlField::ControlField(Eigen::MatrixXd amps, double dt_) : amplitudes(std::move(amps)), dt(dt_) {}

void ControlField::validate() const {
  if (n_steps() < 1) throw PreconditionError("control field needs at least one step");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("control field dt must be > 0");
  if (!amplitudes.allFinite()) throw PreconditionError("control amplitudes must be finite");
}

ControlField random_controls(std::size_t n_steps, std::size_t n_channels, double dt,
                             double amplitude, std::uint64_t seed) {
  ControlField field(n_steps, n_channels, dt);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  // Row-major fill so the draw order does not depend on Eigen's layout.
  for (std::size_t n = 0; n < n_steps; ++n) {
    for (std::size_t k = 0; k < n_channels; ++k) field(n, k) = dist(rng);
  }
  return field;
}

ControlProblem::ControlProblem(SparseComplexMatrix drift,
                               std::vector<SparseComplexMatrix> controls, Backend backend_,
                               double tau_, Storage storage_)
    : backend(backend_), tau(tau_), storage(storage_) {
  if (!drift.square()) throw DimensionError("drift Hamiltonian must be square");
  operators_.reserve(controls.size() + 1);
  operators_.push_back(std::move(drift));
  for (auto& c : controls) operators_.push_back(std::move(c));
  for (const auto& op : operators_) {
    if (op.rows() != dim() || op.cols() != dim()) {
      throw DimensionError("control operator dimension differs from drift");
    }
    if (!is_hermitian(op, kHermitianTol * std::max(1.0, one_norm(op)))) {
      throw PreconditionError("problem operators must be Hermitian");
    }
  }
  if (!(tau > 0.0)) throw PreconditionError("tau must be > 0");
}

SparseComplexMatrix ControlProblem::hamiltonian(const ControlField& a, std::size_t n) const {
  std::vector<Complex> coeffs(operators_.size());
  coeffs[0] = 1.0;
  for (std::size_t k = 0; k < channels(); ++k) coeffs[k + 1] = a(n, k);
  return linear_combine(coeffs, operators_);
}

StepContext ControlProblem::step(const ControlField& a, std::size_t n) const {
  StepContext ctx;
  ctx.hamiltonian = hamiltonian(a, n);
  ctx.controls.assign(operators_.begin() + 1, operators_.end());
  ctx.dt = a.dt;
  ctx.backend = backend;
  ctx.tau = tau;
  ctx.storage = storage;
  return ctx;
}

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::StateInfidelity: return "state_infidelity";
    case CostKind::StatePenalty: return "state_penalty";
    case CostKind::StateRunningInfidelity: return "state_running_infidelity";
    case CostKind::GateInfidelity: return "gate_infidelity";
    case CostKind::GateRunningInfidelity: return "gate_running_infidelity";
  }
  return "unknown";
}

bool is_state_kind(CostKind kind) {
  return kind == CostKind::StateInfidelity || kind == CostKind::StatePenalty ||
         kind == CostKind::StateRunningInfidelity;
}

CostTerm CostTerm::state_infidelity(StateVector target, double weight) {
  CostTerm t;
  t.kind = CostKind::StateInfidelity;
  t.weight = weight;
  t.target_state = std::move(target);
  return t;
}

CostTerm CostTerm::state_penalty(SparseComplexMatrix omega, double weight) {
  CostTerm t;
  t.kind = CostKind::StatePenalty;
  t.weight = weight;
  t.penalty = std::move(omega);
  return t;
}

CostTerm CostTerm::state_running_infidelity(StateVector target, double weight) {
  CostTerm t = state_infidelity(std::move(target), weight);
  t.kind = CostKind::StateRunningInfidelity;
  return t;
}

CostTerm CostTerm::gate_infidelity(DenseMatrix target, double weight) {
  CostTerm t;
  t.kind = CostKind::GateInfidelity;
  t.weight = weight;
  t.target_gate = std::move(target);
  return t;
}

CostTerm CostTerm::gate_running_infidelity(DenseMatrix target, double weight) {
  CostTerm t = gate_infidelity(std::move(target), weight);
  t.kind = CostKind::GateRunningInfidelity;
  return t;
}

void CostTerm::validate(std::size_t dim) const {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw PreconditionError("cost weight must be finite and >= 0");
  }
  switch (kind) {
    case CostKind::StateInfidelity:
    case CostKind::StateRunningInfidelity:
      if (!target_state) throw PreconditionError(std::string(to_string(kind)) + " needs a target state");
      check_state(*target_state, dim, "target state");
      break;
    case CostKind::StatePenalty:
      if (!penalty) throw PreconditionError("state_penalty needs a penalty operator");
      if (penalty->rows() != dim || penalty->cols() != dim) {
        throw DimensionError("penalty operator dimension mismatch");
      }
      if (!is_hermitian(*penalty, kHermitianTol * std::max(1.0, one_norm(*penalty)))) {
        throw PreconditionError("penalty operator must be Hermitian");
      }
      break;
    case CostKind::GateInfidelity:
    case CostKind::GateRunningInfidelity:
      if (!target_gate) throw PreconditionError(std::string(to_string(kind)) + " needs a target gate");
      if (static_cast<std::size_t>(target_gate->rows()) != dim) {
        throw DimensionError("target gate dimension mismatch");
      }
      if (!is_unitary(*target_gate, kUnitaryTol)) {
        throw PreconditionError("target gate is not unitary");
      }
      break;
  }
}

StateVector forward_propagate(const ControlProblem& problem, const ControlField& a,
                              const StateVector& psi0) {
  check_field(problem, a);
  if (psi0.dim() != problem.dim()) throw DimensionError("initial state dimension mismatch");
  StateVector psi(psi0);
  for (std::size_t n = 0; n < a.n_steps(); ++n) {
    const StepPropagator step(problem.step(a, n), false);
    step.forward(psi);
  }
  return psi;
}

GradientResult c1_state_grad(const ControlProblem& problem, const ControlField& a,
                             const StateVector& psi0, const StateVector& target) {
  const CostTerm term = CostTerm::state_infidelity(target);
  const CostTerm* terms[] = {&term};
  return evaluate_state_terms(problem, a, psi0, terms);
}

GradientResult c2_state_grad(const ControlProblem& problem, const ControlField& a,
                             const StateVector& psi0, const SparseComplexMatrix& omega) {
  const CostTerm term = CostTerm::state_penalty(omega);
  const CostTerm* terms[] = {&term};
  return evaluate_state_terms(problem, a, psi0, terms);
}

GradientResult c3_state_grad(const ControlProblem& problem, const ControlField& a,
                             const StateVector& psi0, const StateVector& target) {
  const CostTerm term = CostTerm::state_running_infidelity(target);
  const CostTerm* terms[] = {&term};
  return evaluate_state_terms(problem, a, psi0, terms);
}

GradientResult c1_gate_grad(const ControlProblem& problem, const ControlField& a,
                            const DenseMatrix& target, std::span<const StateVector> basis) {
  check_gate(problem, a, target);
  const std::size_t d = problem.dim();
  const BasisSource source(basis, d);

  instrument::LiveVectorProbe probe;
  const std::size_t n_steps = a.n_steps();
  const std::size_t width = group_size(problem);
  Complex trace = 0.0;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n_steps),
                                                static_cast<Eigen::Index>(problem.channels()));

  for (std::size_t first = 0; first < d; first += width) {
    const std::size_t count = std::min(width, d - first);
    std::vector<StateVector> psi;
    std::vector<StateVector> phi;
    psi.reserve(count);
    phi.reserve(count);
    for (std::size_t g = 0; g < count; ++g) {
      psi.push_back(source[first + g]);
      phi.push_back(apply_target(target, psi.back()));
    }
    forward_group(problem, a, psi, nullptr, nullptr);
    for (std::size_t g = 0; g < count; ++g) trace += inner(phi[g], psi[g]);

    for (std::size_t n = n_steps; n-- > 0;) {
      const StepPropagator step(problem.step(a, n), true);
      for (std::size_t g = 0; g < count; ++g) {
        step.backward(psi[g]);
        for (std::size_t k = 0; k < problem.channels(); ++k) {
          acc(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) +=
              inner(phi[g], step.derivative(k, psi[g]));
        }
        if (n > 0) step.backward(phi[g]);
      }
    }
  }

  const double d2 = static_cast<double>(d) * static_cast<double>(d);
  GradientResult result;
  result.cost = 1.0 - std::norm(trace) / d2;
  result.grad = (-2.0 / d2) * (std::conj(trace) * acc).real();
  result.live_vector_peak = probe.peak();
  return result;
}

GradientResult c3_gate_grad(const ControlProblem& problem, const ControlField& a,
                            const DenseMatrix& target, std::span<const StateVector> basis) {
  check_gate(problem, a, target);
  const std::size_t d = problem.dim();
  const BasisSource source(basis, d);

  instrument::LiveVectorProbe probe;
  const std::size_t n_steps = a.n_steps();
  const std::size_t width = group_size(problem);
  const double scale = 1.0 / (static_cast<double>(n_steps) * static_cast<double>(d) *
                              static_cast<double>(d));

  auto load_group = [&](std::size_t first, std::size_t count, std::vector<StateVector>& psi,
                        std::vector<StateVector>& phi0) {
    psi.clear();
    phi0.clear();
    for (std::size_t g = 0; g < count; ++g) {
      psi.push_back(source[first + g]);
      phi0.push_back(apply_target(target, psi.back()));
    }
  };

  // Sweep 1: traces tr(U_T^dagger U_{n,1}) for every step.
  std::vector<Complex> traces(n_steps, Complex{0.0});
  std::vector<StateVector> psi;
  std::vector<StateVector> phi0;
  for (std::size_t first = 0; first < d; first += width) {
    load_group(first, std::min(width, d - first), psi, phi0);
    forward_group(problem, a, psi, &phi0, &traces);
  }

  GradientResult result;
  double sum_sq = 0.0;
  for (const auto& t : traces) sum_sq += std::norm(t);
  result.cost = 1.0 - sum_sq * scale;
  result.grad = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_steps),
                                      static_cast<Eigen::Index>(problem.channels()));

  // Sweep 2: backward recursion per basis state.
  for (std::size_t first = 0; first < d; first += width) {
    const std::size_t count = std::min(width, d - first);
    load_group(first, count, psi, phi0);
    forward_group(problem, a, psi, nullptr, nullptr);
    std::vector<StateVector> back;
    back.reserve(count);
    for (std::size_t g = 0; g < count; ++g) back.push_back(traces[n_steps - 1] * phi0[g]);

    for (std::size_t n = n_steps; n-- > 0;) {
      const StepPropagator step(problem.step(a, n), true);
      for (std::size_t g = 0; g < count; ++g) {
        step.backward(psi[g]);
        for (std::size_t k = 0; k < problem.channels(); ++k) {
          const Complex overlap = inner(back[g], step.derivative(k, psi[g]));
          result.grad(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) +=
              -2.0 * scale * overlap.real();
        }
        if (n > 0) {
          step.backward(back[g]);
          axpy(traces[n - 1], phi0[g], back[g]);
        }
      }
    }
  }
  result.live_vector_peak = probe.peak();
  return result;
}

GradientResult composite_grad(const ControlProblem& problem, const ControlField& a,
                              std::span<const CostTerm> terms) {
  if (terms.empty()) throw PreconditionError("composite cost needs at least one term");
  std::vector<const CostTerm*> state_terms;
  for (const auto& t : terms) {
    if (is_state_kind(t.kind)) state_terms.push_back(&t);
  }

  GradientResult total;
  total.grad = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.n_steps()),
                                     static_cast<Eigen::Index>(a.n_channels()));
  if (!state_terms.empty()) {
    if (!problem.initial_state) {
      throw PreconditionError("state-transfer terms need problem.initial_state");
    }
    GradientResult r = evaluate_state_terms(problem, a, *problem.initial_state, state_terms);
    total.cost += r.cost;
    total.grad += r.grad;
    total.live_vector_peak = std::max(total.live_vector_peak, r.live_vector_peak);
  }
  for (const auto& t : terms) {
    if (is_state_kind(t.kind)) continue;
    t.validate(problem.dim());
    GradientResult r = t.kind == CostKind::GateInfidelity
                           ? c1_gate_grad(problem, a, *t.target_gate, problem.basis)
                           : c3_gate_grad(problem, a, *t.target_gate, problem.basis);
    total.cost += t.weight * r.cost;
    total.grad += t.weight * r.grad;
    total.live_vector_peak = std::max(total.live_vector_peak, r.live_vector_peak);
  }
  return total;
}

}  // namespace hgrape
