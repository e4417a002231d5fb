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

#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <vector>

#include "hgrape/instrument.hpp"

namespace hgrape::testing {
namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

struct MpComplex {
  Real re;
  Real im;
};

}  // namespace

StateVector dense_expm_action(const SparseComplexMatrix& a, const StateVector& v) {
  const DenseMatrix h = Complex{0.0, 1.0} * to_dense(a);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (h + h.adjoint()));
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<Complex>() * Complex{0.0, -1.0}).array().exp();
  const Eigen::VectorXcd out =
      eig.eigenvectors() * (phases.asDiagonal() * (eig.eigenvectors().adjoint() * to_eigen(v)));
  return to_state(out);
}

StateVector mp_expm_action(const SparseComplexMatrix& a, const StateVector& v) {
  const std::size_t d = v.dim();
  const double norm = one_norm(a);
  const long s = std::max(1L, static_cast<long>(std::ceil(norm / 0.5)));

  // Scaled matrix entries in extended precision.
  struct Entry {
    std::size_t row;
    std::size_t col;
    MpComplex value;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      const Complex z = a.values()[p];
      entries.push_back({i, a.col_indices()[p], {Real(z.real()) / s, Real(z.imag()) / s}});
    }
  }

  std::vector<MpComplex> x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = {Real(v[i].real()), Real(v[i].imag())};
  const Real tol("1e-45");
  std::vector<MpComplex> term(d);
  std::vector<MpComplex> next(d);
  for (long step = 0; step < s; ++step) {
    term = x;
    for (int j = 1; j < 400; ++j) {
      for (auto& t : next) t = {0, 0};
      for (const auto& e : entries) {
        const MpComplex& t = term[e.col];
        next[e.row].re += e.value.re * t.re - e.value.im * t.im;
        next[e.row].im += e.value.re * t.im + e.value.im * t.re;
      }
      Real mag = 0;
      for (std::size_t i = 0; i < d; ++i) {
        next[i].re /= j;
        next[i].im /= j;
        x[i].re += next[i].re;
        x[i].im += next[i].im;
        mag = std::max(mag, abs(next[i].re) + abs(next[i].im));
      }
      std::swap(term, next);
      if (mag < tol) break;
    }
  }
  StateVector out(d);
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = Complex{x[i].re.convert_to<double>(), x[i].im.convert_to<double>()};
  }
  return out;
}

DenseMatrix dense_propagator(const SparseComplexMatrix& h, double dt) {
  const DenseMatrix hd = to_dense(h);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(0.5 * (hd + hd.adjoint()));
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<Complex>() * Complex{0.0, -dt}).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

SparseComplexMatrix random_hermitian(std::size_t d, double density, double scale,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d; ++i) {
    t.push_back({i, i, scale * u(rng)});
    for (std::size_t j = i + 1; j < d; ++j) {
      if (coin(rng) >= density) continue;
      const Complex z{scale * u(rng) / std::sqrt(2.0), scale * u(rng) / std::sqrt(2.0)};
      t.push_back({i, j, z});
      t.push_back({j, i, std::conj(z)});
    }
  }
  return build_csr(std::move(t), d, d);
}

StateVector random_state(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  StateVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = Complex{n(rng), n(rng)};
  v *= Complex{1.0 / v.norm()};
  return v;
}

double relative_error(const StateVector& got, const StateVector& want) {
  return (got - want).norm() / want.norm();
}

Eigen::MatrixXd central_difference(const std::function<double(const ControlField&)>& cost,
                                   const ControlField& a, double h) {
  Eigen::MatrixXd g(a.amplitudes.rows(), a.amplitudes.cols());
  for (std::size_t n = 0; n < a.n_steps(); ++n) {
    for (std::size_t k = 0; k < a.n_channels(); ++k) {
      ControlField plus = a;
      ControlField minus = a;
      plus(n, k) += h;
      minus(n, k) -= h;
      g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) =
          (cost(plus) - cost(minus)) / (2.0 * h);
    }
  }
  return g;
}

GradientResult stored_trajectory_c1_grad(const ControlProblem& problem, const ControlField& a,
                                         const StateVector& psi0, const StateVector& target) {
  instrument::LiveVectorProbe probe;
  const std::size_t n_steps = a.n_steps();
  std::vector<DenseMatrix> u;
  std::vector<StateVector> psi{psi0};
  for (std::size_t n = 0; n < n_steps; ++n) {
    u.push_back(dense_propagator(problem.hamiltonian(a, n), a.dt));
    psi.push_back(matvec(u.back(), psi.back()));
  }
  const Complex overlap = inner(psi.back(), target);

  GradientResult r;
  r.cost = 1.0 - std::norm(overlap);
  r.grad = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_steps),
                                 static_cast<Eigen::Index>(problem.channels()));
  StateVector phi = target;
  for (std::size_t n = n_steps; n-- > 0;) {
    const SparseComplexMatrix h = problem.hamiltonian(a, n);
    for (std::size_t k = 0; k < problem.channels(); ++k) {
      // dU psi from the exact Frechet derivative, evaluated by finite
      // differences of the dense propagator in the control amplitude.
      const double eps = 1e-6;
      std::vector<Complex> cp{1.0, eps};
      std::vector<Complex> cm{1.0, -eps};
      const SparseComplexMatrix ops[] = {h, problem.controls()[k]};
      const DenseMatrix du = (dense_propagator(linear_combine(cp, ops), a.dt) -
                              dense_propagator(linear_combine(cm, ops), a.dt)) /
                             (2.0 * eps);
      r.grad(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) =
          -2.0 * (inner(phi, matvec(du, psi[n])) * overlap).real();
    }
    phi = matvec(DenseMatrix(u[n].adjoint()), phi);
  }
  r.live_vector_peak = static_cast<std::size_t>(probe.peak());
  return r;
}

}  // namespace hgrape::testing
