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

#ifndef HGRAPE_COSTS_HPP_
#define HGRAPE_COSTS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hgrape/derivatives.hpp"
#include "hgrape/linalg.hpp"

namespace hgrape {

// Piecewise-constant control amplitudes a_{n,k}: N steps x K channels.
struct ControlField {
  ControlField() = default;
  ControlField(std::size_t n_steps, std::size_t n_channels, double dt);
  ControlField(Eigen::MatrixXd amplitudes, double dt);

  std::size_t n_steps() const noexcept { return static_cast<std::size_t>(amplitudes.rows()); }
  std::size_t n_channels() const noexcept { return static_cast<std::size_t>(amplitudes.cols()); }
  double operator()(std::size_t n, std::size_t k) const {
    return amplitudes(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  }
  double& operator()(std::size_t n, std::size_t k) {
    return amplitudes(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  }
  void validate() const;

  Eigen::MatrixXd amplitudes;
  double dt = 0.0;
};

// Uniform amplitudes in [-amplitude, amplitude] from a seeded mt19937_64.
ControlField random_controls(std::size_t n_steps, std::size_t n_channels, double dt,
                             double amplitude, std::uint64_t seed);

// H(t) = drift + sum_k a_k(t) controls[k], plus evolution settings.
class ControlProblem {
 public:
  ControlProblem(SparseComplexMatrix drift, std::vector<SparseComplexMatrix> controls,
                 Backend backend = Backend::ScalingSquaring, double tau = 1e-10,
                 Storage storage = Storage::Sparse);

  std::size_t dim() const noexcept { return operators_.front().rows(); }
  std::size_t channels() const noexcept { return operators_.size() - 1; }
  const SparseComplexMatrix& drift() const noexcept { return operators_.front(); }
  std::span<const SparseComplexMatrix> controls() const noexcept {
    return std::span<const SparseComplexMatrix>(operators_).subspan(1);
  }

  Backend backend = Backend::ScalingSquaring;
  double tau = 1e-10;
  Storage storage = Storage::Sparse;
  // Used by composite_grad for state-transfer terms.
  std::optional<StateVector> initial_state;
  // Used by gate terms; empty means the computational basis.
  std::vector<StateVector> basis;

  // Hamiltonian of step n (0-based) under controls a.
  SparseComplexMatrix hamiltonian(const ControlField& a, std::size_t n) const;
  StepContext step(const ControlField& a, std::size_t n) const;

 private:
  std::vector<SparseComplexMatrix> operators_;  // drift, then controls
};

enum class CostKind {
  StateInfidelity,         // 1 - |<phi_T|psi_N>|^2
  StatePenalty,            // (1/N) sum_n <psi_n|Omega|psi_n>
  StateRunningInfidelity,  // 1 - (1/N) sum_n |<phi_T|psi_n>|^2
  GateInfidelity,          // 1 - |tr(U_T^dagger U_R)/d|^2
  GateRunningInfidelity,   // 1 - sum_n |tr(U_T^dagger U_{n,1})|^2 / (N d^2)
};

std::string_view to_string(CostKind kind);
bool is_state_kind(CostKind kind);

struct CostTerm {
  CostKind kind = CostKind::StateInfidelity;
  double weight = 1.0;
  std::optional<StateVector> target_state;
  std::optional<DenseMatrix> target_gate;
  std::optional<SparseComplexMatrix> penalty;

  static CostTerm state_infidelity(StateVector target, double weight = 1.0);
  static CostTerm state_penalty(SparseComplexMatrix omega, double weight = 1.0);
  static CostTerm state_running_infidelity(StateVector target, double weight = 1.0);
  static CostTerm gate_infidelity(DenseMatrix target, double weight = 1.0);
  static CostTerm gate_running_infidelity(DenseMatrix target, double weight = 1.0);

  void validate(std::size_t dim) const;
};

struct GradientResult {
  double cost = 0.0;
  Eigen::MatrixXd grad;  // N x K, dC/da_{n,k}
  // Most StateVectors simultaneously alive during the evaluation.
  std::size_t live_vector_peak = 0;
};

// psi_N; only O(1) vectors are alive at any time.
StateVector forward_propagate(const ControlProblem& problem, const ControlField& a,
                              const StateVector& psi0);

// The gradient routines below recover psi_{n-1} during the backward sweep by
// adjoint-propagating psi_N instead of storing the trajectory. Propagation
// errors therefore accumulate over both sweeps (about 2 N tau in total).
GradientResult c1_state_grad(const ControlProblem& problem, const ControlField& a,
                             const StateVector& psi0, const StateVector& target);
GradientResult c2_state_grad(const ControlProblem& problem, const ControlField& a,
                             const StateVector& psi0, const SparseComplexMatrix& omega);
GradientResult c3_state_grad(const ControlProblem& problem, const ControlField& a,
                             const StateVector& psi0, const StateVector& target);

// Basis empty means the computational basis.
GradientResult c1_gate_grad(const ControlProblem& problem, const ControlField& a,
                            const DenseMatrix& target, std::span<const StateVector> basis = {});
// Caches tr(U_T^dagger U_{n,1}) for every n: N complex scalars.
GradientResult c3_gate_grad(const ControlProblem& problem, const ControlField& a,
                            const DenseMatrix& target, std::span<const StateVector> basis = {});

// Weighted sum. All state-transfer terms share one forward and one backward
// sweep; gate terms are evaluated one kind at a time.
GradientResult composite_grad(const ControlProblem& problem, const ControlField& a,
                              std::span<const CostTerm> terms);

}  // namespace hgrape

#endif  // HGRAPE_COSTS_HPP_
