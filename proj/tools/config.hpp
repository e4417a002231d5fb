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

#ifndef HGRAPE_TOOLS_CONFIG_HPP_
#define HGRAPE_TOOLS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hgrape/bench.hpp"
#include "hgrape/derivatives.hpp"
#include "hgrape/models.hpp"
#include "hgrape/optimizer.hpp"

namespace hgrape::cli {

enum class Command { Optimize, BenchMu, BenchRuntime, Advise, Expm };

// Operators read from matrix text files; paths are resolved against the
// directory of the config file.
struct MatrixModel {
  std::filesystem::path drift;
  std::vector<std::filesystem::path> controls;

  bool operator==(const MatrixModel&) const = default;
};

using ModelSpec = std::variant<TransmonCavityParams, ThreeTransmonsParams, QubitChainParams,
                               FluxoniumPairParams, MatrixModel>;

// A basis index or a vector file.
using StateSpec = std::variant<std::size_t, std::filesystem::path>;

enum class PenaltyKind { Leakage, File };

struct CostSpec {
  CostKind kind = CostKind::StateInfidelity;
  double weight = 1.0;
  // state_penalty only: leakage projector (transmon_cavity) or a matrix file.
  PenaltyKind penalty = PenaltyKind::Leakage;
  std::filesystem::path penalty_file;
  std::size_t leakage_from = 2;

  bool operator==(const CostSpec&) const = default;
};

enum class GateKind { Hadamard, Identity, File };
enum class InitKind { Zero, Fixture, Random };

struct RunConfig {
  Command command = Command::Optimize;
  std::uint64_t seed = 0;

  ModelSpec model = TransmonCavityParams{};
  Task task = Task::StateTransfer;

  std::size_t steps = 1;
  double dt = 0.0;
  double tau = 1e-10;
  Backend backend = Backend::ScalingSquaring;
  Storage storage = Storage::Sparse;

  std::vector<CostSpec> costs;
  std::optional<StateSpec> initial_state;
  std::optional<StateSpec> target_state;
  GateKind gate = GateKind::Hadamard;
  std::filesystem::path gate_file;  // dense matrix in the sparse text format

  InitKind init = InitKind::Random;
  double init_amplitude = 0.1;

  OptimizerConfig optimizer;

  std::vector<std::size_t> sizes;  // model size knob per sweep point
  std::vector<double> dts;
  std::vector<double> taus;
  std::size_t reps = 5;
  bool warmup = true;

  StrategyInputs advise;

  std::filesystem::path expm_matrix;
  std::filesystem::path expm_vector;

  bool operator==(const RunConfig&) const = default;
};

// Raw `key = value` pairs; later duplicates are an error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
// Unknown keys, missing required keys and out-of-range values throw
// ParseError naming the key.
RunConfig parse_config(const KeyValues& kv, Command command,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path, Command command);
// Canonical text: every key written, fixed order. parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);
// FNV-1a over the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

std::string_view to_string(Command command);

}  // namespace hgrape::cli

#endif  // HGRAPE_TOOLS_CONFIG_HPP_
