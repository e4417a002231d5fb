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

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hgrape/error.hpp"
#include "hgrape/expm.hpp"

namespace hgrape {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxTailTerms = 500;

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ErrorModelConstants ErrorModelConstants::from_unit_roundoff(double u) {
  if (!(u > 0.0) || u >= 0.5) throw PreconditionError("unit roundoff must lie in (0, 1/2)");
  return {u, 2.0 * std::sqrt(2.0) * u / (1.0 - 2.0 * u)};
}

ErrorModelConstants ErrorModelConstants::binary64() {
  return from_unit_roundoff(std::ldexp(1.0, -53));
}

double remainder_rm(double x, int m) {
  if (x < 0.0 || std::isnan(x)) throw PreconditionError("remainder_rm: x must be >= 0");
  if (m < 0) throw PreconditionError("remainder_rm: m must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kInf;

  const double q0 = static_cast<double>(m) + 1.0;
  double term = std::exp(q0 * std::log(x) - std::lgamma(q0 + 1.0));
  if (!std::isfinite(term)) return kInf;
  if (term == 0.0) return 0.0;

  double sum = term;
  double q = q0;
  for (int n = 1; n < kMaxTailTerms; ++n) {
    term *= x / (q + 1.0);
    q += 1.0;
    sum += term;
    if (!std::isfinite(sum)) return kInf;
    if (term == 0.0 || term < 1e-20 * sum) return sum;
  }
  // Still not converged: bound the rest by a geometric series if the term
  // ratio has dropped below one.
  const double ratio = x / (q + 1.0);
  if (ratio >= 1.0) return kInf;
  return sum + term * ratio / (1.0 - ratio);
}

double gamma_n(long n, const ErrorModelConstants& consts) {
  if (n < 0) throw PreconditionError("gamma_n: n must be >= 0");
  const double nu = static_cast<double>(n) * consts.u_prime;
  if (nu >= 1.0) {
    throw BoundInfeasibleError("gamma_n: n u' = " + format_real(nu) + " >= 1");
  }
  return nu / (1.0 - nu);
}

double rounding_bound(double norm1_b, int m, long s, std::size_t sigma_prime,
                      const ErrorModelConstants& consts) {
  if (s < 1 || m < 0) throw PreconditionError("rounding_bound: need m >= 0 and s >= 1");
  const double r = remainder_rm(norm1_b, m);
  if (!std::isfinite(r)) return kInf;
  double beta = 0.0;
  try {
    const long stride = static_cast<long>(sigma_prime) + 2;
    double power = 1.0;  // x^k / k!
    for (int k = 0; k <= m; ++k) {
      if (k > 0) power *= norm1_b / static_cast<double>(k);
      beta += gamma_n(k * stride + m + 2, consts) * power;
    }
  } catch (const BoundInfeasibleError&) {
    return kInf;
  }
  if (!std::isfinite(beta)) return kInf;
  const double alpha = 1.0 + r;
  const double sd = static_cast<double>(s);
  // (alpha + beta)^s - alpha^s without cancellation for beta << alpha.
  const double growth = std::exp(sd * std::log1p(r));
  const double result = growth * std::expm1(sd * std::log1p(beta / alpha));
  return std::isfinite(result) ? result : kInf;
}

double truncation_bound(double norm1_b, int m, long s) {
  if (s < 1 || m < 0) throw PreconditionError("truncation_bound: need m >= 0 and s >= 1");
  const double r = remainder_rm(norm1_b, m);
  const double sr = static_cast<double>(s) * r;
  if (!(sr < 1.0)) return kInf;
  if (sr == 0.0) return 0.0;
  return sr * (1.0 - std::pow(sr, static_cast<double>(s))) / (1.0 - sr);
}

double error_bound(double norm1_a, int m, long s, std::size_t sigma_prime,
                   const ErrorModelConstants& consts) {
  const double x = norm1_a / static_cast<double>(s);
  const double t = truncation_bound(x, m, s);
  if (!std::isfinite(t)) return kInf;
  return t + rounding_bound(x, m, s, sigma_prime, consts);
}

ExpmPlan make_plan(double norm1_a, std::size_t sigma_prime, double tau, const PlanLimits& limits,
                   const ErrorModelConstants& consts) {
  if (!(norm1_a >= 0.0) || !std::isfinite(norm1_a)) {
    throw PreconditionError("make_plan: norm must be finite and >= 0");
  }
  if (!(tau > 0.0)) throw PreconditionError("make_plan: tau must be > 0");
  if (limits.m_max < 1 || limits.s_max < 1) throw PreconditionError("make_plan: empty limits");

  for (long s = 1; s <= limits.s_max; ++s) {
    const double x = norm1_a / static_cast<double>(s);
    // Truncation error only shrinks with m, so if even m_max misses the
    // tolerance no m can work at this s.
    if (truncation_bound(x, limits.m_max, s) > tau) continue;
    for (int m = 1; m <= limits.m_max; ++m) {
      const double bound = error_bound(norm1_a, m, s, sigma_prime, consts);
      if (bound <= tau) {
        return ExpmPlan{m, s, static_cast<long>(m) * s, tau, norm1_a, sigma_prime, bound};
      }
    }
  }
  throw PlanningError("make_plan: no (m, s) with m <= " + std::to_string(limits.m_max) +
                      ", s <= " + std::to_string(limits.s_max) + " meets tau = " +
                      format_real(tau) + " for |A|_1 = " + format_real(norm1_a) +
                      ", sigma' = " + std::to_string(sigma_prime));
}

}  // namespace hgrape
