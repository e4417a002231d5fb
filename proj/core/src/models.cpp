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

#include "hgrape/models.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "hgrape/error.hpp"

namespace hgrape {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI{0.0, 1.0};

void require_dim(std::size_t d, std::size_t minimum, const char* what) {
  if (d < minimum) {
    throw PreconditionError(std::string(what) + " must be >= " + std::to_string(minimum));
  }
}

// Embed op acting on site `site` of a register with dimensions dims.
SparseComplexMatrix embed(const SparseComplexMatrix& op, std::span<const std::size_t> dims,
                          std::size_t site) {
  SparseComplexMatrix out = SparseComplexMatrix::identity(1);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    out = kron(out, i == site ? op : SparseComplexMatrix::identity(dims[i]));
  }
  return out;
}

SparseComplexMatrix sum(std::initializer_list<std::pair<Complex, const SparseComplexMatrix*>> terms) {
  std::vector<Complex> coeffs;
  std::vector<SparseComplexMatrix> mats;
  for (const auto& [c, m] : terms) {
    coeffs.push_back(c);
    mats.push_back(*m);
  }
  return linear_combine(coeffs, mats);
}

SparseComplexMatrix kerr(std::size_t d) {
  // n(n - 1) on the diagonal
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < d; ++k) {
    const double n = static_cast<double>(k);
    t.push_back({k, k, n * (n - 1.0)});
  }
  return build_csr(std::move(t), d, d);
}

SparseComplexMatrix pauli(char which) {
  std::vector<Triplet> t;
  switch (which) {
    case 'x': t = {{0, 1, 1.0}, {1, 0, 1.0}}; break;
    case 'y': t = {{0, 1, -kI}, {1, 0, kI}}; break;
    default: t = {{0, 0, 1.0}, {1, 1, -1.0}}; break;
  }
  return build_csr(std::move(t), 2, 2);
}

// Exact zeros for entries that vanish by parity; cos(phi) is even in phi.
DenseMatrix even_function_cos(const DenseMatrix& phi) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(phi);
  if (eig.info() != Eigen::Success) throw EigensolverError("fluxonium: cos(phi) eigensolver failed");
  const Eigen::VectorXd c = eig.eigenvalues().array().cos();
  DenseMatrix out = eig.eigenvectors() * c.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if ((i + j) % 2 != 0) {
        out(i, j) = 0.0;
      } else {
        out(i, j) = out(i, j).real();  // real symmetric in this basis
      }
    }
  }
  return 0.5 * (out + out.adjoint());
}

}  // namespace

SparseComplexMatrix annihilation(std::size_t d) {
  require_dim(d, 1, "oscillator dimension");
  std::vector<Triplet> t;
  for (std::size_t k = 1; k < d; ++k) t.push_back({k - 1, k, std::sqrt(static_cast<double>(k))});
  return build_csr(std::move(t), d, d);
}

SparseComplexMatrix number_operator(std::size_t d) {
  require_dim(d, 1, "oscillator dimension");
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < d; ++k) t.push_back({k, k, static_cast<double>(k)});
  return build_csr(std::move(t), d, d);
}

DenseMatrix fluxonium_phase(std::size_t d, double e_c, double e_l) {
  const DenseMatrix a = to_dense(annihilation(d));
  return std::pow(8.0 * e_c / e_l, 0.25) / std::numbers::sqrt2 * (a + a.adjoint());
}

DenseMatrix fluxonium_charge(std::size_t d, double e_c, double e_l) {
  const DenseMatrix a = to_dense(annihilation(d));
  return kI * std::pow(e_l / (8.0 * e_c), 0.25) / std::numbers::sqrt2 * (a.adjoint() - a);
}

SparseComplexMatrix Model::fixture_hamiltonian() const {
  std::vector<Complex> coeffs{1.0};
  std::vector<SparseComplexMatrix> mats{drift};
  for (std::size_t k = 0; k < controls.size(); ++k) {
    coeffs.emplace_back(fixture_amplitudes.at(k));
    mats.push_back(controls[k]);
  }
  return linear_combine(coeffs, mats);
}

Model build_transmon_cavity(const TransmonCavityParams& p) {
  require_dim(p.d_transmon, 2, "d_transmon");
  require_dim(p.d_cavity, 2, "d_cavity");
  const std::size_t dims[] = {p.d_transmon, p.d_cavity};
  const SparseComplexMatrix b = embed(annihilation(p.d_transmon), dims, 0);
  const SparseComplexMatrix c = embed(annihilation(p.d_cavity), dims, 1);
  const SparseComplexMatrix bd = b.adjoint();
  const SparseComplexMatrix cd = c.adjoint();
  const SparseComplexMatrix nb = embed(number_operator(p.d_transmon), dims, 0);
  const SparseComplexMatrix kb = embed(kerr(p.d_transmon), dims, 0);
  const SparseComplexMatrix c_bd = multiply(c, bd);
  const SparseComplexMatrix cd_b = multiply(cd, b);

  Model m;
  m.name = "transmon_cavity";
  m.drift = sum({{kTwoPi * p.delta, &nb},
                 {kTwoPi * p.anharmonicity / 2.0, &kb},
                 {kTwoPi * p.g, &c_bd},
                 {kTwoPi * p.g, &cd_b}});
  m.controls = {nb, sum({{1.0, &b}, {1.0, &bd}})};
  m.fixture_amplitudes = {kTwoPi * p.a_z, kTwoPi * p.a_x};
  return m;
}

Model build_three_transmons(const ThreeTransmonsParams& p) {
  require_dim(p.d_each, 2, "d_each");
  const std::size_t dims[] = {p.d_each, p.d_each, p.d_each};
  std::vector<SparseComplexMatrix> b;
  std::vector<SparseComplexMatrix> k;
  for (std::size_t nu = 0; nu < 3; ++nu) {
    b.push_back(embed(annihilation(p.d_each), dims, nu));
    k.push_back(embed(kerr(p.d_each), dims, nu));
  }
  const SparseComplexMatrix b1_b2d = multiply(b[0], b[1].adjoint());
  const SparseComplexMatrix b2_b3d = multiply(b[1], b[2].adjoint());
  const SparseComplexMatrix b1d_b2 = b1_b2d.adjoint();
  const SparseComplexMatrix b2d_b3 = b2_b3d.adjoint();
  const Complex half_alpha = kTwoPi * p.anharmonicity / 2.0;
  const Complex g = kTwoPi * p.g;

  Model m;
  m.name = "three_transmons";
  m.drift = sum({{half_alpha, &k[0]},
                 {half_alpha, &k[1]},
                 {half_alpha, &k[2]},
                 {g, &b1_b2d},
                 {g, &b1d_b2},
                 {g, &b2_b3d},
                 {g, &b2d_b3}});
  for (std::size_t nu = 0; nu < 3; ++nu) {
    const SparseComplexMatrix bd = b[nu].adjoint();
    m.controls.push_back(sum({{1.0, &b[nu]}, {1.0, &bd}}));
    m.fixture_amplitudes.push_back(kTwoPi * p.drive);
  }
  return m;
}

Model build_qubit_chain(const QubitChainParams& p) {
  require_dim(p.n_qubits, 1, "n_qubits");
  const std::vector<std::size_t> dims(p.n_qubits, 2);
  const std::size_t d = std::size_t{1} << p.n_qubits;

  Model m;
  m.name = "qubit_chain";
  std::vector<Complex> coeffs;
  std::vector<SparseComplexMatrix> zz;
  for (std::size_t nu = 0; nu + 1 < p.n_qubits; ++nu) {
    zz.push_back(multiply(embed(pauli('z'), dims, nu), embed(pauli('z'), dims, nu + 1)));
    coeffs.emplace_back(kTwoPi * p.g);
  }
  m.drift = zz.empty() ? SparseComplexMatrix::zero(d, d) : linear_combine(coeffs, zz);
  for (std::size_t nu = 0; nu < p.n_qubits; ++nu) {
    m.controls.push_back(embed(pauli('x'), dims, nu));
    m.fixture_amplitudes.push_back(kTwoPi * p.a_x);
    m.controls.push_back(embed(pauli('y'), dims, nu));
    m.fixture_amplitudes.push_back(kTwoPi * p.a_y);
  }
  return m;
}

Model build_fluxonium_pair(const FluxoniumPairParams& p) {
  require_dim(p.d_each, 4, "fluxonium d_each");
  if (!(p.e_c1 > 0 && p.e_c2 > 0 && p.e_l1 > 0 && p.e_l2 > 0)) {
    throw PreconditionError("fluxonium E_C and E_L must be > 0");
  }
  const std::size_t dims[] = {p.d_each, p.d_each};
  const double ec[] = {p.e_c1, p.e_c2};
  const double ej[] = {p.e_j1, p.e_j2};
  const double el[] = {p.e_l1, p.e_l2};

  std::vector<Complex> coeffs;
  std::vector<SparseComplexMatrix> terms;
  std::vector<SparseComplexMatrix> phis;
  std::vector<SparseComplexMatrix> ns;
  for (std::size_t i = 0; i < 2; ++i) {
    const DenseMatrix phi = fluxonium_phase(p.d_each, ec[i], el[i]);
    const DenseMatrix n = fluxonium_charge(p.d_each, ec[i], el[i]);
    // 4 E_C n^2 - E_J cos(phi) + (E_L / 2)(phi - phi_ext)^2, constant dropped
    const DenseMatrix local = 4.0 * ec[i] * n * n - ej[i] * even_function_cos(phi) +
                              0.5 * el[i] * phi * phi - el[i] * p.ext_flux * phi;
    terms.push_back(embed(from_dense(kTwoPi * local), dims, i));
    coeffs.emplace_back(1.0);
    phis.push_back(embed(from_dense(phi), dims, i));
    ns.push_back(embed(from_dense(n), dims, i));
  }
  terms.push_back(multiply(ns[0], ns[1]));
  coeffs.emplace_back(kTwoPi * p.g);

  Model m;
  m.name = "fluxonium_pair";
  m.drift = linear_combine(coeffs, terms);
  for (std::size_t i = 0; i < 2; ++i) {
    m.controls.push_back(phis[i].scaled(-kTwoPi * el[i]));
    m.fixture_amplitudes.push_back(p.drive);
  }
  return m;
}

Model build_model(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> Model {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TransmonCavityParams>) return build_transmon_cavity(p);
        if constexpr (std::is_same_v<P, ThreeTransmonsParams>) return build_three_transmons(p);
        if constexpr (std::is_same_v<P, QubitChainParams>) return build_qubit_chain(p);
        if constexpr (std::is_same_v<P, FluxoniumPairParams>) return build_fluxonium_pair(p);
      },
      params);
}

std::string_view model_name(const ModelParams& params) {
  switch (params.index()) {
    case 0: return "transmon_cavity";
    case 1: return "three_transmons";
    case 2: return "qubit_chain";
    default: return "fluxonium_pair";
  }
}

std::size_t model_size(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TransmonCavityParams>) return p.d_cavity;
        if constexpr (std::is_same_v<P, QubitChainParams>) return p.n_qubits;
        if constexpr (!std::is_same_v<P, TransmonCavityParams> &&
                      !std::is_same_v<P, QubitChainParams>) {
          return p.d_each;
        }
      },
      params);
}

ModelParams with_model_size(const ModelParams& params, std::size_t size) {
  return std::visit(
      [size](auto p) -> ModelParams {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TransmonCavityParams>) {
          p.d_cavity = size;
        } else if constexpr (std::is_same_v<P, QubitChainParams>) {
          p.n_qubits = size;
        } else {
          p.d_each = size;
        }
        return p;
      },
      params);
}

StateVector fock_state(std::size_t d, std::size_t n) {
  if (n >= d) {
    throw PreconditionError("fock_state: level " + std::to_string(n) + " >= dimension " +
                            std::to_string(d));
  }
  return StateVector::basis(d, n);
}

StateVector product_state(std::span<const std::size_t> dims, std::span<const std::size_t> levels) {
  if (dims.size() != levels.size()) throw DimensionError("product_state: dims/levels size mismatch");
  std::size_t d = 1;
  std::size_t index = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (levels[i] >= dims[i]) throw PreconditionError("product_state: level out of range");
    index = index * dims[i] + levels[i];
    d *= dims[i];
  }
  return StateVector::basis(d, index);
}

DenseMatrix hadamard_target(std::size_t n_qubits, std::size_t d_each) {
  require_dim(n_qubits, 1, "n_qubits");
  require_dim(d_each, 2, "d_each");
  DenseMatrix site = DenseMatrix::Identity(static_cast<Eigen::Index>(d_each),
                                           static_cast<Eigen::Index>(d_each));
  const double h = 1.0 / std::numbers::sqrt2;
  site(0, 0) = h;
  site(0, 1) = h;
  site(1, 0) = h;
  site(1, 1) = -h;
  DenseMatrix out = DenseMatrix::Identity(1, 1);
  const Eigen::Index n = site.rows();
  for (std::size_t q = 0; q < n_qubits; ++q) {
    DenseMatrix next(out.rows() * n, out.cols() * n);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        next.block(i * n, j * n, n, n) = out(i, j) * site;
      }
    }
    out.swap(next);
  }
  return out;
}

SparseComplexMatrix transmon_leakage_projector(const TransmonCavityParams& p,
                                               std::size_t from_level) {
  std::vector<Triplet> t;
  for (std::size_t k = from_level; k < p.d_transmon; ++k) t.push_back({k, k, 1.0});
  const std::size_t dims[] = {p.d_transmon, p.d_cavity};
  return embed(build_csr(std::move(t), p.d_transmon, p.d_transmon), dims, 0);
}

}  // namespace hgrape
