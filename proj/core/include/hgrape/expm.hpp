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

#ifndef HGRAPE_EXPM_HPP_
#define HGRAPE_EXPM_HPP_

#include <cstddef>
#include <limits>

#include "hgrape/error.hpp"
#include "hgrape/instrument.hpp"
#include "hgrape/linalg.hpp"

namespace hgrape {

// Rounding model of the working precision. u is the unit roundoff; u_prime
// inflates it for complex multiplication.
struct ErrorModelConstants {
  double u;
  double u_prime;

  static ErrorModelConstants from_unit_roundoff(double u);
  // binary64: u = 2^-53.
  static ErrorModelConstants binary64();
};

// Scalar tail of the exponential series, sum_{q>m} x^q / q!, summed upward
// from q = m+1. Returns +inf when the tail cannot be summed in double range.
double remainder_rm(double x, int m);

// gamma_n = n u' / (1 - n u'). Throws BoundInfeasibleError if n u' >= 1.
double gamma_n(long n, const ErrorModelConstants& consts);

// Upper bound on the floating-point error of (T_m(B))^s applied to a unit
// vector: (alpha + beta)^s - alpha^s, with alpha = 1 + R_m(|B|_1) and
// beta = sum_k gamma_{k(sigma'+2)+m+2} |B|_1^k / k!. Evaluated as
// alpha^s * expm1(s * log1p(beta / alpha)). +inf if any gamma is infeasible.
double rounding_bound(double norm1_b, int m, long s, std::size_t sigma_prime,
                      const ErrorModelConstants& consts = ErrorModelConstants::binary64());

// Geometric-sum bound on the truncation error; +inf once s R_m >= 1.
double truncation_bound(double norm1_b, int m, long s);

// E_A(m, s) = truncation + rounding with |B|_1 = |A|_1 / s.
double error_bound(double norm1_a, int m, long s, std::size_t sigma_prime,
                   const ErrorModelConstants& consts = ErrorModelConstants::binary64());

struct PlanLimits {
  int m_max = 60;
  long s_max = 10000;
};

struct ExpmPlan {
  int m = 1;
  long s = 1;
  long mu = 1;
  double tau = 0.0;
  double norm1 = 0.0;
  std::size_t sigma_prime = 0;
  double bound = 0.0;
};

// Smallest s admitting any m <= m_max with error_bound <= tau, then the
// smallest such m. Throws PlanningError when nothing inside the limits works.
ExpmPlan make_plan(double norm1_a, std::size_t sigma_prime, double tau,
                   const PlanLimits& limits = {},
                   const ErrorModelConstants& consts = ErrorModelConstants::binary64());

// Plan for a concrete anti-Hermitian generator (norm and sigma' read off A).
ExpmPlan plan_for(const SparseComplexMatrix& a, double tau, const PlanLimits& limits = {});

// Scratch for apply_in_place. Together with the in/out vector these are the
// three d-length work vectors the engine needs.
struct ExpmWorkspace {
  explicit ExpmWorkspace(std::size_t dim) : term(dim), next(dim) {}
  StateVector term;
  StateVector next;
};

// v <- (T_m(direction * A / s))^s v using exactly plan.mu products with A.
// direction = -1 applies the inverse e^{-A}. No precondition checks.
template <LinearOperator Op>
void apply_in_place(const Op& a, const ExpmPlan& plan, StateVector& v, ExpmWorkspace& ws,
                    double direction = 1.0) {
  const std::size_t d = v.dim();
  if (static_cast<std::size_t>(a.rows()) != d || static_cast<std::size_t>(a.cols()) != d ||
      ws.term.dim() != d || ws.next.dim() != d) {
    throw DimensionError("expm apply: dimension mismatch");
  }
  const double s = static_cast<double>(plan.s);
  for (long l = 0; l < plan.s; ++l) {
    std::copy(v.entries().begin(), v.entries().end(), ws.term.entries().begin());
    for (int j = 1; j <= plan.m; ++j) {
      multiply_into(a, ws.term.entries(), ws.next.entries(),
                    Complex{direction / (s * static_cast<double>(j))});
      instrument::count_matvec();
      ws.term.swap(ws.next);
      v += ws.term;
    }
  }
}

// e^A psi for anti-Hermitian A. Throws PreconditionError if A is not
// anti-Hermitian to 1e-12 |A|_1 or the plan was made for a smaller norm or
// sparser A; DimensionError on shape mismatch.
StateVector apply(const SparseComplexMatrix& a, const StateVector& psi, const ExpmPlan& plan);

struct ExpmResult {
  StateVector state;
  long mu;
  ExpmPlan plan;
};

ExpmResult expm_multiply(const SparseComplexMatrix& a, const StateVector& psi, double tau);

}  // namespace hgrape

#endif  // HGRAPE_EXPM_HPP_
