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

#include <random>
#include <sstream>
#include <vector>

#include "hgrape/error.hpp"
#include "hgrape/instrument.hpp"
#include "hgrape/linalg.hpp"
#include "hgrape/models.hpp"
#include "oracles.hpp"

namespace hgrape {
namespace {

SparseComplexMatrix sigma_x() { return build_csr({{0, 1, 1.0}, {1, 0, 1.0}}, 2, 2); }
SparseComplexMatrix sigma_z() { return build_csr({{0, 0, 1.0}, {1, 1, -1.0}}, 2, 2); }

void expect_csr_invariants(const SparseComplexMatrix& m) {
  const auto off = m.row_offsets();
  ASSERT_EQ(off.size(), m.rows() + 1);
  EXPECT_EQ(off.back(), m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    EXPECT_LE(off[i], off[i + 1]);
    for (std::size_t p = off[i]; p + 1 < off[i + 1]; ++p) {
      EXPECT_LT(m.col_indices()[p], m.col_indices()[p + 1]);
    }
  }
  for (const Complex& v : m.values()) {
    EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
    EXPECT_NE(v, Complex{});
  }
}

TEST(BuildCsr, IdentityFromTriplets) {
  const auto m = build_csr({{0, 0, 1.0}, {1, 1, 1.0}}, 2, 2);
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.coeff(0, 0), Complex(1.0));
  EXPECT_EQ(m.coeff(0, 1), Complex(0.0));
  expect_csr_invariants(m);
}

TEST(BuildCsr, DuplicatesAreSummed) {
  const auto m = build_csr({{0, 1, 1.0}, {0, 1, 1.0}}, 2, 2);
  ASSERT_EQ(m.nnz(), 1u);
  EXPECT_EQ(m.coeff(0, 1), Complex(2.0));
}

TEST(BuildCsr, CancellingDuplicatesAreDropped) {
  const auto m = build_csr({{1, 0, 2.5}, {1, 0, -2.5}, {0, 0, 1.0}}, 2, 2);
  EXPECT_EQ(m.nnz(), 1u);
  expect_csr_invariants(m);
}

TEST(BuildCsr, OutOfRangeIndexThrows) {
  EXPECT_THROW(build_csr({{2, 0, 1.0}}, 2, 2), DimensionError);
  EXPECT_THROW(build_csr({{0, 3, 1.0}}, 2, 3), DimensionError);
}

TEST(BuildCsr, NonFiniteValueThrows) {
  EXPECT_THROW(build_csr({{0, 0, Complex(std::nan(""), 0.0)}}, 1, 1), PreconditionError);
}

TEST(BuildCsr, TransmonCavityNnzMatchesDenseScan) {
  const Model model = build_transmon_cavity({});
  ASSERT_EQ(model.dim(), 300u);
  for (const auto* op : {&model.drift, &model.controls[0], &model.controls[1]}) {
    const DenseMatrix dense = to_dense(*op);
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
      for (Eigen::Index j = 0; j < dense.cols(); ++j) count += dense(i, j) != Complex{} ? 1 : 0;
    }
    EXPECT_EQ(op->nnz(), count);
    EXPECT_EQ(from_dense(dense).nnz(), count);
    expect_csr_invariants(*op);
  }
}

TEST(Matvec, IdentityAndSigmaX) {
  const StateVector v{Complex(1.0, 2.0), Complex(3.0, -1.0)};
  const StateVector id = matvec(SparseComplexMatrix::identity(2), v);
  EXPECT_EQ(id[0], v[0]);
  EXPECT_EQ(id[1], v[1]);
  const StateVector x = matvec(sigma_x(), v);
  EXPECT_EQ(x[0], v[1]);
  EXPECT_EQ(x[1], v[0]);
}

TEST(Matvec, DimensionMismatchThrows) {
  EXPECT_THROW(matvec(sigma_x(), StateVector(3)), DimensionError);
}

TEST(Matvec, AgreesWithDenseProduct) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 32; ++i) {
      for (std::size_t j = 0; j < 32; ++j) {
        if (coin(rng) < 0.2) t.push_back({i, j, Complex(u(rng), u(rng))});
      }
    }
    const auto m = build_csr(t, 32, 32);
    const StateVector v = testing::random_state(32, rng);
    const Eigen::VectorXcd want = to_dense(m) * to_eigen(v);
    const StateVector got = matvec(m, v);
    const StateVector got_dense = matvec(to_dense(m), v);
    const double tol = 1e-14 * one_norm(m) * v.norm();
    EXPECT_LE((to_eigen(got) - want).norm(), tol);
    EXPECT_LE((to_eigen(got_dense) - want).norm(), tol);
  }
}

TEST(Matvec, Distributive) {
  std::mt19937_64 rng(3);
  const auto a = testing::random_hermitian(20, 0.3, 1.0, rng);
  const auto b = testing::random_hermitian(20, 0.3, 1.0, rng);
  const StateVector v = testing::random_state(20, rng);
  const SparseComplexMatrix ops[] = {a, b};
  const Complex ones[] = {1.0, 1.0};
  const StateVector lhs = matvec(linear_combine(ones, ops), v);
  const StateVector rhs = matvec(a, v) + matvec(b, v);
  EXPECT_LE((lhs - rhs).norm(), 1e-14 * (one_norm(a) + one_norm(b)));
}

TEST(Norms, OneNormExamples) {
  EXPECT_EQ(one_norm(SparseComplexMatrix::identity(5)), 1.0);
  EXPECT_EQ(one_norm(sigma_x()), 1.0);
  EXPECT_EQ(one_norm(SparseComplexMatrix::zero(3, 3)), 0.0);
  const auto m = build_csr({{0, 0, 1.0}, {1, 0, Complex(0.0, -2.0)}, {0, 1, 1.0}}, 2, 2);
  EXPECT_DOUBLE_EQ(one_norm(m), 3.0);
  EXPECT_DOUBLE_EQ(inf_norm(m), 2.0);
  EXPECT_DOUBLE_EQ(one_norm(to_dense(m)), 3.0);
  EXPECT_DOUBLE_EQ(inf_norm(to_dense(m)), 2.0);
}

TEST(Norms, ScalesWithFactor) {
  std::mt19937_64 rng(5);
  const auto h = testing::random_hermitian(16, 0.4, 2.0, rng);
  for (double s : {2.0, 7.0, 1000.0}) {
    EXPECT_NEAR(one_norm(h.scaled(1.0 / s)), one_norm(h) / s, 1e-14 * one_norm(h));
  }
}

TEST(Norms, MaxRowNnz) {
  EXPECT_EQ(max_row_nnz(SparseComplexMatrix::identity(4)), 1u);
  EXPECT_EQ(max_row_nnz(SparseComplexMatrix::zero(4, 4)), 0u);
  const auto m = build_csr({{0, 0, 1.0}, {0, 1, 1.0}, {0, 2, 1.0}, {2, 2, 1.0}}, 3, 3);
  EXPECT_EQ(max_row_nnz(m), 3u);
  EXPECT_EQ(max_row_nnz(to_dense(m)), 3u);
}

TEST(LinearCombine, ExactCancellationDropsEntries) {
  const Complex coeffs[] = {1.0, -1.0};
  const SparseComplexMatrix ops[] = {SparseComplexMatrix::identity(3),
                                     SparseComplexMatrix::identity(3)};
  EXPECT_EQ(linear_combine(coeffs, ops).nnz(), 0u);
}

TEST(LinearCombine, PauliSum) {
  const Complex coeffs[] = {1.0, 1.0};
  const SparseComplexMatrix ops[] = {sigma_x(), sigma_z()};
  const auto m = linear_combine(coeffs, ops);
  EXPECT_EQ(m.nnz(), 4u);
  EXPECT_EQ(m.coeff(1, 1), Complex(-1.0));
  expect_csr_invariants(m);
}

TEST(LinearCombine, ShapeMismatchThrows) {
  const Complex coeffs[] = {1.0, 1.0};
  const SparseComplexMatrix ops[] = {sigma_x(), SparseComplexMatrix::identity(3)};
  EXPECT_THROW(linear_combine(coeffs, ops), DimensionError);
}

TEST(Products, MultiplyAndKronMatchDense) {
  std::mt19937_64 rng(9);
  const auto a = testing::random_hermitian(6, 0.5, 1.0, rng);
  const auto b = testing::random_hermitian(6, 0.5, 1.0, rng);
  EXPECT_LE((to_dense(multiply(a, b)) - to_dense(a) * to_dense(b)).cwiseAbs().maxCoeff(), 1e-14);
  const auto k = kron(sigma_x(), b);
  ASSERT_EQ(k.rows(), 12u);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ(k.coeff(i, 6 + j), b.coeff(i, j));
      EXPECT_EQ(k.coeff(6 + i, j), b.coeff(i, j));
      EXPECT_EQ(k.coeff(i, j), Complex{});
    }
  }
}

TEST(AuxEmbed, BlockLayout) {
  const auto h = build_csr({{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}}, 2, 2);
  const auto c = sigma_z();
  const double dt = 0.5;
  const auto aux = aux_embed(h, c, dt);
  ASSERT_EQ(aux.rows(), 4u);
  const Complex mi{0.0, -dt};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(aux.coeff(i, j), mi * h.coeff(i, j));
      EXPECT_EQ(aux.coeff(2 + i, 2 + j), mi * h.coeff(i, j));
      EXPECT_EQ(aux.coeff(i, 2 + j), mi * c.coeff(i, j));
      EXPECT_EQ(aux.coeff(2 + i, j), Complex{});
    }
  }
  expect_csr_invariants(aux);
}

TEST(AuxEmbed, NnzAndNormAdditivity) {
  std::mt19937_64 rng(21);
  const auto h = testing::random_hermitian(10, 0.3, 1.0, rng);
  const auto c = testing::random_hermitian(10, 0.3, 1.0, rng);
  const double dt = 0.3;
  const auto aux = aux_embed(h, c, dt);
  EXPECT_EQ(aux.nnz(), 2 * h.nnz() + c.nnz());
  // Column j of the right block stacks control and Hamiltonian columns.
  DenseMatrix hd = to_dense(h) * dt;
  DenseMatrix cd = to_dense(c) * dt;
  const double want = (hd.cwiseAbs().colwise().sum() + cd.cwiseAbs().colwise().sum()).maxCoeff();
  EXPECT_NEAR(one_norm(aux), std::max(want, one_norm(h) * dt), 1e-13);
}

TEST(AuxEmbed, ShapeMismatchThrows) {
  EXPECT_THROW(aux_embed(sigma_x(), SparseComplexMatrix::identity(3), 1.0), DimensionError);
}

TEST(Hermiticity, Checks) {
  EXPECT_TRUE(is_hermitian(sigma_x(), 0.0));
  const auto y = build_csr({{0, 1, Complex(0, -1)}, {1, 0, Complex(0, 1)}}, 2, 2);
  EXPECT_TRUE(is_hermitian(y, 0.0));
  const auto bad = build_csr({{0, 1, 1.0}}, 2, 2);
  EXPECT_FALSE(is_hermitian(bad, 1e-12));
  EXPECT_TRUE(is_anti_hermitian(sigma_x().scaled(Complex(0, -1)), 0.0));
  EXPECT_FALSE(is_anti_hermitian(sigma_x(), 1e-12));
  const auto near = build_csr({{0, 1, 1.0}, {1, 0, 1.0 + 1e-13}}, 2, 2);
  EXPECT_TRUE(is_hermitian(near, 1e-12));
  EXPECT_FALSE(is_hermitian(near, 1e-14));
}

TEST(Io, MatrixAndVectorRoundTrip) {
  std::mt19937_64 rng(17);
  const auto m = testing::random_hermitian(9, 0.4, 3.0, rng);
  std::stringstream ms;
  write_matrix(ms, m);
  const auto back = read_matrix(ms);
  ASSERT_EQ(back.nnz(), m.nnz());
  for (std::size_t p = 0; p < m.nnz(); ++p) EXPECT_EQ(back.values()[p], m.values()[p]);

  const StateVector v = testing::random_state(9, rng);
  std::stringstream vs;
  write_vector(vs, v);
  const StateVector vb = read_vector(vs);
  ASSERT_EQ(vb.dim(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(vb[i], v[i]);
}

TEST(Io, MalformedInputThrows) {
  std::stringstream bad("2 2 1\n0 5 1 0\n");
  EXPECT_THROW(read_matrix(bad), Error);
  std::stringstream truncated("3\n1 0\n");
  EXPECT_THROW(read_vector(truncated), Error);
}

TEST(Census, CountsLiveVectors) {
  instrument::LiveVectorProbe probe;
  {
    StateVector a(4);
    StateVector b(4);
    StateVector c = a;
  }
  StateVector d(4);
  EXPECT_EQ(probe.peak(), 3u);
}

}  // namespace
}  // namespace hgrape
