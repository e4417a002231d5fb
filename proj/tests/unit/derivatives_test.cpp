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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hgrape/derivatives.hpp"
#include "hgrape/error.hpp"
#include "oracles.hpp"

namespace hgrape {
namespace {

SparseComplexMatrix sigma_x() { return build_csr({{0, 1, 1.0}, {1, 0, 1.0}}, 2, 2); }
SparseComplexMatrix sigma_z() { return build_csr({{0, 0, 1.0}, {1, 1, -1.0}}, 2, 2); }

StepContext context(SparseComplexMatrix h, std::vector<SparseComplexMatrix> controls, double dt,
                    Backend backend, double tau = 1e-10) {
  StepContext ctx;
  ctx.hamiltonian = std::move(h);
  ctx.controls = std::move(controls);
  ctx.dt = dt;
  ctx.backend = backend;
  ctx.tau = tau;
  return ctx;
}

SparseComplexMatrix shifted(const SparseComplexMatrix& h, const SparseComplexMatrix& c,
                            double eps) {
  const Complex coeffs[] = {1.0, eps};
  const SparseComplexMatrix ops[] = {h, c};
  return linear_combine(coeffs, ops);
}

// (U(a + eps) - U(a - eps)) psi / (2 eps) with dense propagators.
StateVector fd_derivative(const SparseComplexMatrix& h, const SparseComplexMatrix& c, double dt,
                          const StateVector& psi, double eps) {
  const DenseMatrix du = (testing::dense_propagator(shifted(h, c, eps), dt) -
                          testing::dense_propagator(shifted(h, c, -eps), dt)) /
                         (2.0 * eps);
  return matvec(du, psi);
}

SparseComplexMatrix dA(const SparseComplexMatrix& c, double dt) {
  return c.scaled(Complex(0.0, -dt));
}

class BothBackends : public ::testing::TestWithParam<Backend> {};

TEST_P(BothBackends, ZeroHamiltonianPropagatesToSelf) {
  std::mt19937_64 rng(1);
  const StateVector psi = testing::random_state(5, rng);
  const auto ctx = context(SparseComplexMatrix::zero(5, 5), {}, 0.3, GetParam());
  EXPECT_LE(testing::relative_error(propagate(ctx, psi), psi), 1e-10);
  EXPECT_LE(testing::relative_error(propagate_adjoint(ctx, psi), psi), 1e-10);
}

TEST_P(BothBackends, RabiQuarterTurn) {
  const double omega = 2.0;
  const double dt = std::numbers::pi / 2 / omega;
  const auto ctx = context(sigma_x().scaled(omega), {}, dt, GetParam());
  const StateVector out = propagate(ctx, StateVector::basis(2, 0));
  const StateVector want{Complex(0.0), Complex(0.0, -1.0)};
  EXPECT_LE(testing::relative_error(out, want), 1e-10);
}

TEST_P(BothBackends, AdjointInvertsForward) {
  std::mt19937_64 rng(2);
  const double tau = 1e-10;
  const auto h = testing::random_hermitian(16, 0.3, 2.0, rng);
  const StateVector psi = testing::random_state(16, rng);
  const auto ctx = context(h, {}, 0.7, GetParam(), tau);
  EXPECT_LE(testing::relative_error(propagate_adjoint(ctx, propagate(ctx, psi)), psi), 4 * tau);
}

TEST_P(BothBackends, AdjointMatchesDenseOracle) {
  std::mt19937_64 rng(3);
  const double tau = 1e-10;
  const auto h = testing::random_hermitian(16, 0.4, 1.0, rng);
  const StateVector psi = testing::random_state(16, rng);
  const double dt = 0.9;
  const auto ctx = context(h, {}, dt, GetParam(), tau);
  const DenseMatrix u = testing::dense_propagator(h, dt);
  const StateVector want = matvec(DenseMatrix(u.adjoint()), psi);
  EXPECT_LE(testing::relative_error(propagate_adjoint(ctx, psi), want), 2 * tau);
}

TEST_P(BothBackends, CommutingControlClosedForm) {
  const double a = 0.8;
  const double dt = 0.6;
  const auto ctx = context(sigma_x().scaled(a), {sigma_x()}, dt, GetParam());
  const StateVector psi{Complex(0.6), Complex(0.0, 0.8)};
  StepPropagator step(ctx, true);
  const StateVector got = step.derivative(0, psi);
  // d/da e^{-i a dt X} = -i dt X e^{-i a dt X}
  StateVector want = matvec(sigma_x(), propagate(ctx, psi));
  want *= Complex(0.0, -dt);
  EXPECT_LE(testing::relative_error(got, want), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Derivatives, BothBackends,
                         ::testing::Values(Backend::ScalingSquaring, Backend::Diagonalization));

TEST(Propagate, BackendsAgree) {
  std::mt19937_64 rng(4);
  const double tau = 1e-10;
  const auto h = testing::random_hermitian(24, 0.3, 1.5, rng);
  const StateVector psi = testing::random_state(24, rng);
  const StateVector ss = propagate(context(h, {}, 1.0, Backend::ScalingSquaring, tau), psi);
  const StateVector dg = propagate(context(h, {}, 1.0, Backend::Diagonalization, tau), psi);
  EXPECT_LE(testing::relative_error(ss, dg), 2 * tau);
}

TEST(Propagate, DenseStorageMatchesSparse) {
  std::mt19937_64 rng(5);
  const auto h = testing::random_hermitian(20, 0.2, 1.0, rng);
  const StateVector psi = testing::random_state(20, rng);
  auto ctx = context(h, {}, 1.0, Backend::ScalingSquaring, 1e-12);
  const StateVector sparse = propagate(ctx, psi);
  ctx.storage = Storage::Dense;
  EXPECT_LE(testing::relative_error(propagate(ctx, psi), sparse), 1e-12);
}

TEST(StepContext, Validation) {
  EXPECT_THROW(context(sigma_x(), {}, 0.0, Backend::ScalingSquaring).validate(), PreconditionError);
  const auto bad = build_csr({{0, 1, 1.0}}, 2, 2);
  EXPECT_THROW(context(bad, {}, 1.0, Backend::ScalingSquaring).validate(), PreconditionError);
  EXPECT_THROW(
      context(sigma_x(), {SparseComplexMatrix::identity(3)}, 1.0, Backend::ScalingSquaring)
          .validate(),
      DimensionError);
}

TEST(DerivativeAux, ZeroControl) {
  std::mt19937_64 rng(6);
  const auto h = testing::random_hermitian(6, 0.5, 1.0, rng);
  const auto ctx =
      context(h, {SparseComplexMatrix::zero(6, 6)}, 0.5, Backend::ScalingSquaring);
  const StateVector psi = testing::random_state(6, rng);
  const auto r = derivative_action_aux(ctx, 0, psi);
  EXPECT_LE(r.d_u_psi.norm(), 1e-14);
  EXPECT_LE(testing::relative_error(r.u_psi, propagate(ctx, psi)), 2e-10);
}

TEST(DerivativeAux, CommutingClosedForm) {
  const double a = 1.3;
  const double dt = 0.4;
  const auto ctx = context(sigma_x().scaled(a), {sigma_x()}, dt, Backend::ScalingSquaring);
  const StateVector psi = StateVector::basis(2, 0);
  const auto r = derivative_action_aux(ctx, 0, psi);
  StateVector want = matvec(sigma_x(), r.u_psi);
  want *= Complex(0.0, -dt);
  EXPECT_LE(testing::relative_error(r.d_u_psi, want), 1e-9);
}

TEST(DerivativeAux, MatchesFiniteDifference) {
  std::mt19937_64 rng(7);
  const auto h = testing::random_hermitian(12, 0.4, 1.0, rng);
  const auto c = testing::random_hermitian(12, 0.4, 1.0, rng);
  const double dt = 0.5;
  const StateVector psi = testing::random_state(12, rng);
  const auto r = derivative_action_aux(context(h, {c}, dt, Backend::ScalingSquaring, 1e-12), 0, psi);
  EXPECT_LE(testing::relative_error(r.d_u_psi, fd_derivative(h, c, dt, psi, 1e-6)), 1e-7);
}

TEST(DerivativeAux, BadChannelThrows) {
  const auto ctx = context(sigma_x(), {sigma_z()}, 0.5, Backend::ScalingSquaring);
  EXPECT_THROW(derivative_action_aux(ctx, 1, StateVector::basis(2, 0)), Error);
}

TEST(DerivativeAux, GeneralPlanNorm) {
  const auto m = build_csr({{0, 0, 1.0}, {0, 1, 3.0}, {1, 1, 1.0}}, 2, 2);
  // |m|_1 = 4, |m|_inf = 4.
  EXPECT_DOUBLE_EQ(general_plan_norm(m), 4.0);
  const auto n = build_csr({{0, 0, 1.0}, {0, 1, 1.0}}, 2, 2);
  EXPECT_DOUBLE_EQ(general_plan_norm(n), std::sqrt(1.0 * 2.0));
}

TEST(DiagPrepare, ZeroHamiltonian) {
  const auto f = diag_prepare(context(SparseComplexMatrix::zero(3, 3), {}, 1.0,
                                      Backend::Diagonalization));
  EXPECT_LE((f.S * f.S.adjoint() - DenseMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(f.D.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DiagPrepare, PauliZEigenvalues) {
  const double dt = 0.25;
  const auto f = diag_prepare(context(sigma_z(), {}, dt, Backend::Diagonalization));
  std::vector<double> im{f.D(0).imag(), f.D(1).imag()};
  std::sort(im.begin(), im.end());
  EXPECT_NEAR(im[0], -dt, 1e-15);
  EXPECT_NEAR(im[1], dt, 1e-15);
}

TEST(DiagPrepare, FactorizationInvariants) {
  std::mt19937_64 rng(8);
  const auto h = testing::random_hermitian(32, 0.3, 2.0, rng);
  const double dt = 0.7;
  const auto f = diag_prepare(context(h, {}, dt, Backend::Diagonalization));
  const DenseMatrix a = to_dense(h) * Complex(0.0, -dt);
  const DenseMatrix recon = f.S * f.D.asDiagonal() * f.S.adjoint();
  EXPECT_LE((recon - a).cwiseAbs().maxCoeff(), 1e-12 * one_norm(a));
  EXPECT_LE((f.S * f.S.adjoint() - DenseMatrix::Identity(32, 32)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(f.D.real().cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index i = 0; i < 32; ++i) {
    EXPECT_EQ(f.E(i, i), Complex{});
    EXPECT_EQ(f.F(i, i), Complex{});
    for (Eigen::Index j = 0; j < 32; ++j) EXPECT_EQ(f.E(i, j), -f.E(j, i));
  }
}

TEST(DerivativeDiag, ZeroDerivative) {
  std::mt19937_64 rng(9);
  const auto h = testing::random_hermitian(5, 0.5, 1.0, rng);
  const auto f = diag_prepare(context(h, {}, 1.0, Backend::Diagonalization));
  const StateVector out =
      derivative_action_diag(f, SparseComplexMatrix::zero(5, 5), testing::random_state(5, rng));
  EXPECT_EQ(out.norm(), 0.0);
}

TEST(DerivativeDiag, CommutingClosedForm) {
  const double a = 0.9;
  const double dt = 0.5;
  const auto ctx = context(sigma_x().scaled(a), {}, dt, Backend::Diagonalization);
  const StateVector psi{Complex(0.6), Complex(0.0, 0.8)};
  const StateVector got = derivative_action_diag(diag_prepare(ctx), dA(sigma_x(), dt), psi);
  StateVector want = matvec(sigma_x(), propagate(ctx, psi));
  want *= Complex(0.0, -dt);
  EXPECT_LE(testing::relative_error(got, want), 1e-12);
}

TEST(DerivativeDiag, AgreesWithAux) {
  std::mt19937_64 rng(10);
  const auto h = testing::random_hermitian(12, 0.4, 1.0, rng);
  const auto c = testing::random_hermitian(12, 0.4, 1.0, rng);
  const double dt = 0.8;
  const StateVector psi = testing::random_state(12, rng);
  const auto ctx = context(h, {c}, dt, Backend::Diagonalization, 1e-12);
  const StateVector diag = derivative_action_diag(diag_prepare(ctx), dA(c, dt), psi);
  auto aux_ctx = ctx;
  aux_ctx.backend = Backend::ScalingSquaring;
  const auto aux = derivative_action_aux(aux_ctx, 0, psi);
  EXPECT_LE(testing::relative_error(diag, aux.d_u_psi), 1e-8);
}

TEST(DerivativeDiag, DegenerateSpectrumMatchesFiniteDifference) {
  const auto h = build_csr({{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 2.0}}, 3, 3);
  const auto c = build_csr({{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, Complex(0, 1)},
                            {2, 1, Complex(0, -1)}, {0, 0, 0.5}},
                           3, 3);
  const double dt = 0.6;
  const StateVector psi{Complex(0.5), Complex(0.5, 0.5), Complex(0.0, 0.5)};
  const auto ctx = context(h, {c}, dt, Backend::Diagonalization);
  const StateVector got = derivative_action_diag(diag_prepare(ctx), dA(c, dt), psi);
  ASSERT_TRUE(got.all_finite());
  EXPECT_LE(testing::relative_error(got, fd_derivative(h, c, dt, psi, 1e-5)), 1e-8);
}

// Central differences converge at second order: halving eps quarters the
// error against the exact derivative.
TEST(DerivativeDiag, SecondOrderFiniteDifferenceConvergence) {
  std::mt19937_64 rng(12);
  const auto h = testing::random_hermitian(6, 0.6, 1.0, rng);
  const auto c = testing::random_hermitian(6, 0.6, 1.0, rng);
  const double dt = 1.5;
  const StateVector psi = testing::random_state(6, rng);
  for (Backend b : {Backend::ScalingSquaring, Backend::Diagonalization}) {
    StepPropagator step(context(h, {c}, dt, b, 1e-12), true);
    const StateVector exact = step.derivative(0, psi);
    const double e1 = testing::relative_error(fd_derivative(h, c, dt, psi, 1e-4), exact);
    const double e2 = testing::relative_error(fd_derivative(h, c, dt, psi, 5e-5), exact);
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
  }
}

TEST(StepPropagator, PlansAreReused) {
  std::mt19937_64 rng(13);
  const auto h = testing::random_hermitian(8, 0.4, 1.0, rng);
  const auto c = testing::random_hermitian(8, 0.4, 1.0, rng);
  StepPropagator step(context(h, {c}, 0.5, Backend::ScalingSquaring), true);
  EXPECT_EQ(step.plan().norm1, one_norm(h) * 0.5);
  EXPECT_GE(step.aux_plan(0).norm1, step.plan().norm1);
  EXPECT_THROW(step.factorization(), Error);
}

}  // namespace
}  // namespace hgrape
