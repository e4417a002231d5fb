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

#include "hgrape/bench.hpp"

namespace hgrape {

std::string_view to_string(KappaScaling v) {
  return v == KappaScaling::SubQuadratic ? "sub_quadratic" : "quadratic";
}

std::string_view to_string(MuScaling v) {
  return v == MuScaling::Sublinear ? "sublinear" : "linear_or_worse";
}

std::string_view to_string(Strategy v) {
  switch (v) {
    case Strategy::FullAD: return "full_ad";
    case Strategy::SemiAD: return "semi_ad";
    case Strategy::HG_ScalingSquaring: return "hg_scaling_squaring";
    case Strategy::HG_Diagonalization: return "hg_diagonalization";
  }
  return "unknown";
}

// First pick how gradients are obtained, then how propagator-state products
// are evaluated for hard-coded gradients.
StrategyRecommendation strategy_advise(const StrategyInputs& in) {
  if (in.memory_budget_ok_for_ad) {
    return {Strategy::FullAD,
            "the full computational graph fits in memory, so automatic differentiation "
            "avoids deriving gradients by hand"};
  }
  if (!in.gradients_available) {
    return {Strategy::SemiAD,
            "full AD does not fit in memory and analytic gradients are not available; "
            "semi-automatic differentiation reduces the graph that must be stored"};
  }
  if (in.kappa == KappaScaling::SubQuadratic) {
    return {Strategy::HG_ScalingSquaring,
            "sparse Hamiltonian: scaling and squaring needs Theta(d + kappa) memory, "
            "diagonalization needs O(d^2)"};
  }
  if (in.task == Task::Gate) {
    return {Strategy::HG_Diagonalization,
            "dense Hamiltonian, gate task: scaling and squaring costs Theta(mu d^3) per step, "
            "diagonalization O(d^3)"};
  }
  if (in.mu == MuScaling::Sublinear) {
    return {Strategy::HG_ScalingSquaring,
            "dense Hamiltonian, state transfer: Theta(mu d^2) with mu sublinear in d beats "
            "O(d^3) diagonalization"};
  }
  return {Strategy::HG_Diagonalization,
          "dense Hamiltonian, state transfer with mu growing at least linearly in d: "
          "diagonalization is no slower"};
}

}  // namespace hgrape
