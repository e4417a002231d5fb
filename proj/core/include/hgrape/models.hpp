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

#ifndef HGRAPE_MODELS_HPP_
#define HGRAPE_MODELS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hgrape/linalg.hpp"

namespace hgrape {

// Frequencies and energies are given as f = omega / 2pi in GHz; builders
// multiply by 2pi, so time is measured in ns.

// Driven transmon (b) coupled to a cavity (c). Basis index = i_t * d_cavity + i_c.
struct TransmonCavityParams {
  double delta = 3.0;
  double anharmonicity = -0.225;
  double g = 0.1;
  std::size_t d_transmon = 6;
  std::size_t d_cavity = 50;
  // Constant amplitudes used for the mu / runtime fixtures.
  double a_z = 0.1;
  double a_x = 0.1;

  bool operator==(const TransmonCavityParams&) const = default;
};

// Three resonantly driven transmons, nearest-neighbour exchange coupling.
// Transmon 1 is the most significant tensor factor.
struct ThreeTransmonsParams {
  double anharmonicity = -0.225;
  double g = 0.1;
  std::size_t d_each = 6;
  double drive = 0.1;  // every channel

  bool operator==(const ThreeTransmonsParams&) const = default;
};

// N_q qubits, sigma_x / sigma_y drives, g sigma_z sigma_z between neighbours.
struct QubitChainParams {
  std::size_t n_qubits = 4;
  double g = 0.1;
  double a_x = 0.5;
  double a_y = 0.5;

  bool operator==(const QubitChainParams&) const = default;
};

// Two capacitively coupled fluxonium qubits in the harmonic-oscillator basis.
struct FluxoniumPairParams {
  double e_c1 = 2.5;
  double e_c2 = 2.5;
  double e_j1 = 8.9;
  double e_j2 = 8.9;
  double e_l1 = 0.5;
  double e_l2 = 0.5;
  double g = 0.1;
  std::size_t d_each = 10;
  double ext_flux = 0.33;  // radians, static offset inside the inductive term
  double drive = 0.0;      // fixture flux drive phi_i(t)

  bool operator==(const FluxoniumPairParams&) const = default;
};

using ModelParams =
    std::variant<TransmonCavityParams, ThreeTransmonsParams, QubitChainParams, FluxoniumPairParams>;

struct Model {
  std::string name;
  SparseComplexMatrix drift;
  std::vector<SparseComplexMatrix> controls;
  std::vector<double> fixture_amplitudes;  // angular units, one per control

  std::size_t dim() const noexcept { return drift.rows(); }
  // drift + sum_k fixture_amplitudes[k] controls[k]
  SparseComplexMatrix fixture_hamiltonian() const;
};

// Controls: [b^dagger b, b + b^dagger] on the transmon factor.
Model build_transmon_cavity(const TransmonCavityParams& p);
// Controls: b_nu + b_nu^dagger for nu = 1, 2, 3.
Model build_three_transmons(const ThreeTransmonsParams& p);
// Controls: sigma_x^(1), sigma_y^(1), sigma_x^(2), ...
Model build_qubit_chain(const QubitChainParams& p);
// Controls: -E_L1 phi_1, -E_L2 phi_2. The scalar E_L phi(t)^2 / 2 is dropped.
Model build_fluxonium_pair(const FluxoniumPairParams& p);

Model build_model(const ModelParams& params);
std::string_view model_name(const ModelParams& params);

// The dimension knob of each model: cavity cutoff, transmon cutoff, qubit
// count, fluxonium cutoff.
std::size_t model_size(const ModelParams& params);
ModelParams with_model_size(const ModelParams& params, std::size_t size);

// Single-mode operators on a truncated oscillator of dimension d.
SparseComplexMatrix annihilation(std::size_t d);
SparseComplexMatrix number_operator(std::size_t d);

// Fluxonium single-mode operators (dense, d x d).
DenseMatrix fluxonium_phase(std::size_t d, double e_c, double e_l);
DenseMatrix fluxonium_charge(std::size_t d, double e_c, double e_l);

// |n> in dimension d. Throws PreconditionError if n >= d.
StateVector fock_state(std::size_t d, std::size_t n);
// Tensor product basis state; dims and levels run most significant first.
StateVector product_state(std::span<const std::size_t> dims, std::span<const std::size_t> levels);

// Hadamard on the lowest two levels of every site, identity above, tensored.
DenseMatrix hadamard_target(std::size_t n_qubits, std::size_t d_each);

// Projector onto transmon levels >= from_level (identity on the cavity).
SparseComplexMatrix transmon_leakage_projector(const TransmonCavityParams& p,
                                               std::size_t from_level = 2);

}  // namespace hgrape

#endif  // HGRAPE_MODELS_HPP_
