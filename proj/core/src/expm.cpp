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

#include "hgrape/expm.hpp"

#include "hgrape/error.hpp"

namespace hgrape {

ExpmPlan plan_for(const SparseComplexMatrix& a, double tau, const PlanLimits& limits) {
  return make_plan(one_norm(a), max_row_nnz(a), tau, limits);
}

StateVector apply(const SparseComplexMatrix& a, const StateVector& psi, const ExpmPlan& plan) {
  if (!a.square() || a.cols() != psi.dim()) throw DimensionError("expm apply: dimension mismatch");
  const double norm = one_norm(a);
  if (!is_anti_hermitian(a, 1e-12 * norm)) {
    throw PreconditionError("expm apply: generator is not anti-Hermitian");
  }
  if (plan.norm1 < norm * (1.0 - 1e-12) || plan.sigma_prime < max_row_nnz(a)) {
    throw PreconditionError("expm apply: plan was made for a smaller norm or sparser matrix");
  }
  StateVector out(psi);
  ExpmWorkspace ws(psi.dim());
  apply_in_place(a, plan, out, ws);
  return out;
}

ExpmResult expm_multiply(const SparseComplexMatrix& a, const StateVector& psi, double tau) {
  const ExpmPlan plan = plan_for(a, tau);
  return ExpmResult{apply(a, psi, plan), plan.mu, plan};
}

}  // namespace hgrape
