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

#ifndef HGRAPE_DERIVATIVES_HPP_
#define HGRAPE_DERIVATIVES_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "hgrape/expm.hpp"
#include "hgrape/linalg.hpp"

namespace hgrape {

enum class Backend { ScalingSquaring, Diagonalization };

// How generators are held for matrix-vector products. Dense storage keeps
// all d^2 entries (kappa = d^2) while planning still uses the sparsity
// pattern, since exact zeros contribute no rounding error.
enum class Storage { Sparse, Dense };

// Everything needed to evolve across one control step.
struct StepContext {
  SparseComplexMatrix hamiltonian;            // H_n
  std::vector<SparseComplexMatrix> controls;  // h_c, one per channel
  double dt = 0.0;
  Backend backend = Backend::ScalingSquaring;
  double tau = 1e-10;
  Storage storage = Storage::Sparse;

  // Throws PreconditionError / DimensionError on bad input.
  void validate() const;
  std::size_t dim() const noexcept { return hamiltonian.rows(); }
};

// A = S D S^dagger for A = -i H dt.
struct DiagFactorization {
  std::size_t dim = 0;
  DenseMatrix S;
  Eigen::VectorXcd D;
  Eigen::VectorXcd expD;
  DenseMatrix E;  // E_ij = e^{D_jj} - e^{D_ii}
  DenseMatrix F;  // F_ij = 1 / (D_jj - D_ii), 0 on (near-)degenerate pairs
  // Hadamard factor (e^D + E o F) with degenerate pairs set to their limit
  // e^{D_ii}; built as exp((D_ii + D_jj)/2) sinc((D_jj - D_ii)/2i).
  DenseMatrix kernel;
};

DiagFactorization diag_prepare(const StepContext& ctx);

// (d e^A / da) psi for dA/da = dA_da, via S ((kernel) o (S^dagger dA S)) S^dagger.
StateVector derivative_action_diag(const DiagFactorization& fact,
                                   const SparseComplexMatrix& dA_da, const StateVector& psi);

struct DerivativeAction {
  StateVector d_u_psi;  // (dU_n / da_channel) psi
  StateVector u_psi;    // U_n psi
};

StateVector propagate(const StepContext& ctx, const StateVector& psi);
StateVector propagate_adjoint(const StepContext& ctx, const StateVector& psi);

// Top and bottom blocks of exp(aux) (0, psi). The auxiliary generator is not
// anti-Hermitian, so its plan uses sqrt(|aux|_1 |aux|_inf) as the norm.
DerivativeAction derivative_action_aux(const StepContext& ctx, std::size_t channel,
                                       const StateVector& psi);

// Norm substituted for |B|_1 when planning a non-anti-Hermitian generator.
double general_plan_norm(const SparseComplexMatrix& m);

// One step's propagator with plans / factorizations prepared once and reused
// for forward, adjoint and derivative products. Immutable after construction;
// every call allocates its own scratch.
class StepPropagator {
 public:
  StepPropagator(StepContext ctx, bool with_derivatives);

  std::size_t dim() const noexcept { return ctx_.dim(); }
  std::size_t channels() const noexcept { return ctx_.controls.size(); }
  const StepContext& context() const noexcept { return ctx_; }

  void forward(StateVector& psi) const;   // psi <- U_n psi
  void backward(StateVector& psi) const;  // psi <- U_n^dagger psi

  StateVector derivative(std::size_t channel, const StateVector& psi) const;
  DerivativeAction derivative_with_state(std::size_t channel, const StateVector& psi) const;

  // Scaling-and-squaring only.
  const ExpmPlan& plan() const;
  const ExpmPlan& aux_plan(std::size_t channel) const;
  const DiagFactorization& factorization() const;

 private:
  void check_channel(std::size_t channel) const;
  // Top block of exp(aux_channel) (0, psi); bottom block copied to u_psi.
  StateVector aux_product(std::size_t channel, const StateVector& psi, StateVector* u_psi) const;

  StepContext ctx_;
  bool with_derivatives_;

  SparseComplexMatrix generator_;
  std::optional<DenseMatrix> dense_generator_;
  ExpmPlan plan_;
  std::vector<SparseComplexMatrix> aux_;
  std::vector<DenseMatrix> dense_aux_;
  std::vector<ExpmPlan> aux_plans_;

  std::optional<DiagFactorization> fact_;
  std::vector<DenseMatrix> inner_derivatives_;  // kernel o (S^dagger dA_k S)
};

}  // namespace hgrape

#endif  // HGRAPE_DERIVATIVES_HPP_
