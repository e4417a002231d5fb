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

#include "hgrape/derivatives.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hgrape/error.hpp"

namespace hgrape {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kDegeneracyTol = 1e-12;

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

SparseComplexMatrix generator_of(const StepContext& ctx) {
  return ctx.hamiltonian.scaled(Complex{0.0, -ctx.dt});
}

Eigen::VectorXcd apply_factorized(const DiagFactorization& f, const StateVector& psi,
                                  bool adjoint) {
  const Eigen::VectorXcd coeffs = f.S.adjoint() * to_eigen(psi);
  const Eigen::VectorXcd phases = adjoint ? Eigen::VectorXcd(f.expD.conjugate()) : f.expD;
  return f.S * phases.cwiseProduct(coeffs);
}

void assign(StateVector& dst, const Eigen::VectorXcd& src) {
  std::copy(src.data(), src.data() + src.size(), dst.entries().begin());
}

DenseMatrix inner_derivative(const DiagFactorization& f, const SparseComplexMatrix& dA_da) {
  const DenseMatrix m = f.S.adjoint() * to_dense(dA_da) * f.S;
  return f.kernel.cwiseProduct(m);
}

}  // namespace

void StepContext::validate() const {
  if (!hamiltonian.square()) throw DimensionError("step: Hamiltonian must be square");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("step: dt must be > 0");
  if (!(tau > 0.0)) throw PreconditionError("step: tau must be > 0");
  const double scale = std::max(1.0, one_norm(hamiltonian));
  if (!is_hermitian(hamiltonian, kHermitianTol * scale)) {
    throw PreconditionError("step: Hamiltonian is not Hermitian");
  }
  for (const auto& h : controls) {
    if (h.rows() != dim() || h.cols() != dim()) {
      throw DimensionError("step: control operator dimension differs from Hamiltonian");
    }
    if (!is_hermitian(h, kHermitianTol * std::max(1.0, one_norm(h)))) {
      throw PreconditionError("step: control operator is not Hermitian");
    }
  }
}

double general_plan_norm(const SparseComplexMatrix& m) {
  return std::sqrt(one_norm(m) * inf_norm(m));
}

DiagFactorization diag_prepare(const StepContext& ctx) {
  const DenseMatrix h = to_dense(ctx.hamiltonian);
  const auto d = h.rows();
  DiagFactorization f;
  f.dim = static_cast<std::size_t>(d);
  if (d == 0) return f;

  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw EigensolverError("diag_prepare: eigensolver failed");
  const Eigen::VectorXd lambda = solver.eigenvalues();
  f.S = solver.eigenvectors();
  f.D = (Complex{0.0, -ctx.dt} * lambda.cast<Complex>()).eval();
  f.expD = f.D.array().exp().matrix();

  const double max_d = f.D.cwiseAbs().maxCoeff();
  f.E.resize(d, d);
  f.F.resize(d, d);
  f.kernel.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const Complex gap = f.D(j) - f.D(i);
      f.E(i, j) = f.expD(j) - f.expD(i);
      const bool degenerate = i == j || std::abs(gap) <= kDegeneracyTol * max_d;
      f.F(i, j) = degenerate ? Complex{0.0} : 1.0 / gap;
      // Divided difference of exp at D_ii, D_jj; exact on the diagonal and
      // continuous through degenerate pairs.
      const double half_angle = 0.5 * (lambda(j) - lambda(i)) * ctx.dt;
      f.kernel(i, j) = std::exp(0.5 * (f.D(i) + f.D(j))) * sinc(half_angle);
    }
  }
  return f;
}

StateVector derivative_action_diag(const DiagFactorization& fact,
                                   const SparseComplexMatrix& dA_da, const StateVector& psi) {
  if (dA_da.rows() != fact.dim || dA_da.cols() != fact.dim || psi.dim() != fact.dim) {
    throw DimensionError("derivative_action_diag: dimension mismatch");
  }
  const DenseMatrix inner = inner_derivative(fact, dA_da);
  const Eigen::VectorXcd out = fact.S * (inner * (fact.S.adjoint() * to_eigen(psi)));
  return to_state(out);
}

StateVector propagate(const StepContext& ctx, const StateVector& psi) {
  StepPropagator step(ctx, false);
  StateVector out(psi);
  step.forward(out);
  return out;
}

StateVector propagate_adjoint(const StepContext& ctx, const StateVector& psi) {
  StepPropagator step(ctx, false);
  StateVector out(psi);
  step.backward(out);
  return out;
}

DerivativeAction derivative_action_aux(const StepContext& ctx, std::size_t channel,
                                       const StateVector& psi) {
  StepContext aux_ctx = ctx;
  aux_ctx.backend = Backend::ScalingSquaring;
  StepPropagator step(std::move(aux_ctx), true);
  return step.derivative_with_state(channel, psi);
}

// ---------------------------------------------------------------------------

StepPropagator::StepPropagator(StepContext ctx, bool with_derivatives)
    : ctx_(std::move(ctx)), with_derivatives_(with_derivatives) {
  ctx_.validate();
  if (ctx_.backend == Backend::ScalingSquaring) {
    generator_ = generator_of(ctx_);
    plan_ = make_plan(one_norm(generator_), max_row_nnz(generator_), ctx_.tau);
    if (ctx_.storage == Storage::Dense) dense_generator_ = to_dense(generator_);
    if (with_derivatives_) {
      aux_.reserve(channels());
      aux_plans_.reserve(channels());
      for (const auto& h : ctx_.controls) {
        SparseComplexMatrix aux = aux_embed(ctx_.hamiltonian, h, ctx_.dt);
        aux_plans_.push_back(make_plan(general_plan_norm(aux), max_row_nnz(aux), ctx_.tau));
        if (ctx_.storage == Storage::Dense) dense_aux_.push_back(to_dense(aux));
        aux_.push_back(std::move(aux));
      }
    }
  } else {
    fact_ = diag_prepare(ctx_);
    if (with_derivatives_) {
      inner_derivatives_.reserve(channels());
      for (const auto& h : ctx_.controls) {
        inner_derivatives_.push_back(inner_derivative(*fact_, h.scaled(Complex{0.0, -ctx_.dt})));
      }
    }
  }
}

void StepPropagator::forward(StateVector& psi) const {
  if (psi.dim() != dim()) throw DimensionError("propagate: dimension mismatch");
  if (fact_) {
    assign(psi, apply_factorized(*fact_, psi, false));
    return;
  }
  ExpmWorkspace ws(dim());
  if (dense_generator_) {
    apply_in_place(*dense_generator_, plan_, psi, ws, 1.0);
  } else {
    apply_in_place(generator_, plan_, psi, ws, 1.0);
  }
}

void StepPropagator::backward(StateVector& psi) const {
  if (psi.dim() != dim()) throw DimensionError("propagate_adjoint: dimension mismatch");
  if (fact_) {
    assign(psi, apply_factorized(*fact_, psi, true));
    return;
  }
  // U^dagger = e^{-A}; |-A|_1 = |A|_1 so the forward plan is reused.
  ExpmWorkspace ws(dim());
  if (dense_generator_) {
    apply_in_place(*dense_generator_, plan_, psi, ws, -1.0);
  } else {
    apply_in_place(generator_, plan_, psi, ws, -1.0);
  }
}

void StepPropagator::check_channel(std::size_t channel) const {
  if (!with_derivatives_) throw PreconditionError("step propagator built without derivatives");
  if (channel >= channels()) throw DimensionError("derivative: channel index out of range");
}

StateVector StepPropagator::derivative(std::size_t channel, const StateVector& psi) const {
  check_channel(channel);
  if (psi.dim() != dim()) throw DimensionError("derivative: dimension mismatch");
  if (fact_) {
    const Eigen::VectorXcd out =
        fact_->S * (inner_derivatives_[channel] * (fact_->S.adjoint() * to_eigen(psi)));
    return to_state(out);
  }
  return aux_product(channel, psi, nullptr);
}

DerivativeAction StepPropagator::derivative_with_state(std::size_t channel,
                                                       const StateVector& psi) const {
  check_channel(channel);
  if (psi.dim() != dim()) throw DimensionError("derivative: dimension mismatch");
  if (fact_) {
    StateVector u_psi(psi);
    forward(u_psi);
    return {derivative(channel, psi), std::move(u_psi)};
  }
  StateVector u_psi(dim());
  StateVector d_u_psi = aux_product(channel, psi, &u_psi);
  return {std::move(d_u_psi), std::move(u_psi)};
}

StateVector StepPropagator::aux_product(std::size_t channel, const StateVector& psi,
                                        StateVector* u_psi) const {
  const auto d = static_cast<std::ptrdiff_t>(dim());
  StateVector stacked(2 * dim());
  std::copy(psi.entries().begin(), psi.entries().end(), stacked.entries().begin() + d);
  {
    ExpmWorkspace ws(2 * dim());
    if (ctx_.storage == Storage::Dense) {
      apply_in_place(dense_aux_[channel], aux_plans_[channel], stacked, ws, 1.0);
    } else {
      apply_in_place(aux_[channel], aux_plans_[channel], stacked, ws, 1.0);
    }
  }
  const auto all = stacked.entries();
  if (u_psi != nullptr) std::copy(all.begin() + d, all.end(), u_psi->entries().begin());
  StateVector top(dim());
  std::copy(all.begin(), all.begin() + d, top.entries().begin());
  return top;
}

const ExpmPlan& StepPropagator::plan() const {
  if (fact_) throw PreconditionError("plan(): diagonalization backend has no expm plan");
  return plan_;
}

const ExpmPlan& StepPropagator::aux_plan(std::size_t channel) const {
  check_channel(channel);
  if (fact_) throw PreconditionError("aux_plan(): diagonalization backend has no expm plan");
  return aux_plans_[channel];
}

const DiagFactorization& StepPropagator::factorization() const {
  if (!fact_) throw PreconditionError("factorization(): scaling-and-squaring backend");
  return *fact_;
}

}  // namespace hgrape
