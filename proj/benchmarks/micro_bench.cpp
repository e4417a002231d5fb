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


#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "hgrape/costs.hpp"
#include "hgrape/expm.hpp"
#include "hgrape/linalg.hpp"
#include "hgrape/models.hpp"

namespace hgrape {
namespace {

constexpr double kDt = 0.1;

Model cavity_model(std::size_t d_cavity) {
  TransmonCavityParams p;
  p.d_cavity = d_cavity;
  return build_transmon_cavity(p);
}

void BM_Matvec(benchmark::State& state) {
  const Model m = cavity_model(static_cast<std::size_t>(state.range(0)));
  const SparseComplexMatrix h = m.fixture_hamiltonian();
  const StateVector psi = fock_state(m.dim(), 0);
  for (auto _ : state) {
    StateVector out = matvec(h, psi);
    benchmark::DoNotOptimize(out);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(m.dim()));
}
BENCHMARK(BM_Matvec)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_MakePlan(benchmark::State& state) {
  const double norm = static_cast<double>(state.range(0));
  for (auto _ : state) {
    ExpmPlan plan = make_plan(norm, 10, 1e-8);
    benchmark::DoNotOptimize(plan);
  }
}
BENCHMARK(BM_MakePlan)->RangeMultiplier(4)->Range(1, 256);

void BM_ExpmApply(benchmark::State& state) {
  const Model m = cavity_model(static_cast<std::size_t>(state.range(0)));
  const SparseComplexMatrix a = m.fixture_hamiltonian().scaled(Complex(0.0, -kDt));
  const ExpmPlan plan = plan_for(a, 1e-8);
  const StateVector psi = fock_state(m.dim(), 0);
  for (auto _ : state) {
    StateVector out = apply(a, psi, plan);
    benchmark::DoNotOptimize(out);
  }
  state.counters["mu"] = static_cast<double>(plan.mu);
  state.SetComplexityN(static_cast<benchmark::IterationCount>(m.dim()));
}
BENCHMARK(BM_ExpmApply)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void state_gradient(benchmark::State& state, Backend backend) {
  const Model m = cavity_model(static_cast<std::size_t>(state.range(0)));
  ControlProblem p(m.drift, m.controls, backend, 1e-8);
  const ControlField a = random_controls(1, m.controls.size(), kDt, 0.1, 1);
  const StateVector psi0 = fock_state(m.dim(), 0);
  const StateVector target = fock_state(m.dim(), 1);
  for (auto _ : state) {
    GradientResult r = c1_state_grad(p, a, psi0, target);
    benchmark::DoNotOptimize(r);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(m.dim()));
}

void BM_StateGradientScalingSquaring(benchmark::State& state) {
  state_gradient(state, Backend::ScalingSquaring);
}
BENCHMARK(BM_StateGradientScalingSquaring)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_StateGradientDiagonalization(benchmark::State& state) {
  state_gradient(state, Backend::Diagonalization);
}
BENCHMARK(BM_StateGradientDiagonalization)->RangeMultiplier(2)->Range(8, 64)->Complexity();

}  // namespace
}  // namespace hgrape

BENCHMARK_MAIN();
