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

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "hgrape/error.hpp"

namespace hgrape::cli {
namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
    throw ParseError(key + ": expected a real number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || text.empty()) {
    throw ParseError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool is_integer(const std::string& text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

template <typename E>
struct Names {
  E value;
  const char* name;
};

template <typename E, std::size_t N>
E parse_enum(const std::string& key, const std::string& text, const Names<E> (&names)[N]) {
  for (const auto& n : names) {
    if (text == n.name) return n.value;
  }
  std::string allowed;
  for (const auto& n : names) allowed += std::string(allowed.empty() ? "" : ", ") + n.name;
  throw ParseError(key + ": unknown value '" + text + "' (expected one of " + allowed + ")");
}

template <typename E, std::size_t N>
const char* enum_name(E value, const Names<E> (&names)[N]) {
  for (const auto& n : names) {
    if (n.value == value) return n.name;
  }
  return "?";
}

const Names<Task> kTasks[] = {{Task::StateTransfer, "state_transfer"}, {Task::Gate, "gate"}};
const Names<Backend> kBackends[] = {{Backend::ScalingSquaring, "scaling_squaring"},
                                    {Backend::Diagonalization, "diagonalization"}};
const Names<Storage> kStorages[] = {{Storage::Sparse, "sparse"}, {Storage::Dense, "dense"}};
const Names<CostKind> kCostKinds[] = {
    {CostKind::StateInfidelity, "state_infidelity"},
    {CostKind::StatePenalty, "state_penalty"},
    {CostKind::StateRunningInfidelity, "state_running_infidelity"},
    {CostKind::GateInfidelity, "gate_infidelity"},
    {CostKind::GateRunningInfidelity, "gate_running_infidelity"}};
const Names<InitKind> kInits[] = {
    {InitKind::Zero, "zero"}, {InitKind::Fixture, "fixture"}, {InitKind::Random, "random"}};
const Names<EtaSchedule> kSchedules[] = {{EtaSchedule::Constant, "constant"},
                                         {EtaSchedule::Backtracking, "backtracking"}};
const Names<KappaScaling> kKappas[] = {{KappaScaling::SubQuadratic, "sub_quadratic"},
                                       {KappaScaling::Quadratic, "quadratic"}};
const Names<MuScaling> kMus[] = {{MuScaling::Sublinear, "sublinear"},
                                 {MuScaling::LinearOrWorse, "linear_or_worse"}};
const Names<bool> kBools[] = {{true, "true"}, {false, "false"}};

// Tracks which keys were read so leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const KeyValues& kv, fs::path base) : kv_(kv), base_(std::move(base)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::optional<std::string> take(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw ParseError("missing required key '" + key + "'");
    return *v;
  }

  void real(const std::string& key, double& out) {
    if (auto v = take(key)) out = parse_real(key, *v);
  }
  void count(const std::string& key, std::size_t& out) {
    if (auto v = take(key)) out = static_cast<std::size_t>(parse_u64(key, *v));
  }
  template <typename E, std::size_t N>
  void choice(const std::string& key, E& out, const Names<E> (&names)[N]) {
    if (auto v = take(key)) out = parse_enum(key, *v, names);
  }

  fs::path file(const std::string& key, const std::string& text) const {
    fs::path p(text);
    if (p.is_relative() && !base_.empty()) p = base_ / p;
    p = p.lexically_normal();
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) {
      throw ParseError(key + ": file '" + p.string() + "' does not exist");
    }
    return p;
  }

  void finish() const {
    for (const auto& [key, value] : kv_) {
      if (used_.count(key) == 0) throw ParseError("unknown key '" + key + "'");
    }
  }

 private:
  const KeyValues& kv_;
  fs::path base_;
  std::set<std::string> used_;
};

void positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ParseError(key + ": must be > 0");
}

void at_least(const std::string& key, std::size_t v, std::size_t minimum) {
  if (v < minimum) throw ParseError(key + ": must be >= " + std::to_string(minimum));
}

ModelSpec read_model(Reader& r) {
  const std::string kind = r.require("model.kind");
  if (kind == "transmon_cavity") {
    TransmonCavityParams p;
    r.real("model.delta", p.delta);
    r.real("model.anharmonicity", p.anharmonicity);
    r.real("model.g", p.g);
    r.count("model.d_transmon", p.d_transmon);
    r.count("model.d_cavity", p.d_cavity);
    r.real("model.a_z", p.a_z);
    r.real("model.a_x", p.a_x);
    at_least("model.d_transmon", p.d_transmon, 2);
    at_least("model.d_cavity", p.d_cavity, 2);
    return p;
  }
  if (kind == "three_transmons") {
    ThreeTransmonsParams p;
    r.real("model.anharmonicity", p.anharmonicity);
    r.real("model.g", p.g);
    r.count("model.d_each", p.d_each);
    r.real("model.drive", p.drive);
    at_least("model.d_each", p.d_each, 2);
    return p;
  }
  if (kind == "qubit_chain") {
    QubitChainParams p;
    r.count("model.n_qubits", p.n_qubits);
    r.real("model.g", p.g);
    r.real("model.a_x", p.a_x);
    r.real("model.a_y", p.a_y);
    at_least("model.n_qubits", p.n_qubits, 1);
    if (p.n_qubits > 24) throw ParseError("model.n_qubits: must be <= 24");
    return p;
  }
  if (kind == "fluxonium_pair") {
    FluxoniumPairParams p;
    r.real("model.e_c1", p.e_c1);
    r.real("model.e_c2", p.e_c2);
    r.real("model.e_j1", p.e_j1);
    r.real("model.e_j2", p.e_j2);
    r.real("model.e_l1", p.e_l1);
    r.real("model.e_l2", p.e_l2);
    r.real("model.g", p.g);
    r.count("model.d_each", p.d_each);
    r.real("model.ext_flux", p.ext_flux);
    r.real("model.drive", p.drive);
    at_least("model.d_each", p.d_each, 4);
    positive("model.e_c1", p.e_c1);
    positive("model.e_c2", p.e_c2);
    positive("model.e_l1", p.e_l1);
    positive("model.e_l2", p.e_l2);
    return p;
  }
  if (kind == "matrices") {
    MatrixModel m;
    m.drift = r.file("model.drift", r.require("model.drift"));
    for (const auto& item : split_list(r.require("model.controls"))) {
      m.controls.push_back(r.file("model.controls", item));
    }
    if (m.controls.empty()) throw ParseError("model.controls: needs at least one file");
    return m;
  }
  throw ParseError("model.kind: unknown value '" + kind +
                   "' (expected one of transmon_cavity, three_transmons, qubit_chain, "
                   "fluxonium_pair, matrices)");
}

std::optional<StateSpec> read_state(Reader& r, const std::string& key) {
  const auto v = r.take(key);
  if (!v) return std::nullopt;
  if (is_integer(*v)) return StateSpec{static_cast<std::size_t>(parse_u64(key, *v))};
  return StateSpec{r.file(key, *v)};
}

std::vector<CostSpec> read_costs(Reader& r) {
  std::vector<CostSpec> costs;
  for (std::size_t i = 1;; ++i) {
    const std::string prefix = "cost." + std::to_string(i) + ".";
    if (!r.has(prefix + "kind")) {
      if (r.has(prefix + "weight")) throw ParseError("missing required key '" + prefix + "kind'");
      break;
    }
    CostSpec c;
    c.kind = parse_enum(prefix + "kind", r.require(prefix + "kind"), kCostKinds);
    // Weights have no natural default, so they must be given.
    c.weight = parse_real(prefix + "weight", r.require(prefix + "weight"));
    if (!(c.weight >= 0.0)) throw ParseError(prefix + "weight: must be >= 0");
    if (c.kind == CostKind::StatePenalty) {
      const std::string pen = r.take(prefix + "penalty").value_or("leakage");
      if (pen == "leakage") {
        c.penalty = PenaltyKind::Leakage;
        r.count(prefix + "leakage_from", c.leakage_from);
      } else {
        c.penalty = PenaltyKind::File;
        c.penalty_file = r.file(prefix + "penalty", pen);
      }
    }
    costs.push_back(std::move(c));
  }
  return costs;
}

std::vector<double> real_list(Reader& r, const std::string& key) {
  std::vector<double> out;
  if (const auto v = r.take(key)) {
    for (const auto& item : split_list(*v)) out.push_back(parse_real(key, item));
  }
  return out;
}

std::vector<std::size_t> count_list(Reader& r, const std::string& key) {
  std::vector<std::size_t> out;
  if (const auto v = r.take(key)) {
    for (const auto& item : split_list(*v)) {
      out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
    }
  }
  return out;
}

bool uses_model(Command c) { return c != Command::Advise && c != Command::Expm; }

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Optimize: return "optimize";
    case Command::BenchMu: return "bench-mu";
    case Command::BenchRuntime: return "bench-runtime";
    case Command::Advise: return "advise";
    case Command::Expm: return "expm";
  }
  return "?";
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  std::string section;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": bad section");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (!kv.emplace(key, value).second) {
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

RunConfig parse_config(const KeyValues& kv, Command command, const fs::path& base_dir) {
  Reader r(kv, base_dir);
  RunConfig c;
  c.command = command;
  if (const auto v = r.take("seed")) c.seed = parse_u64("seed", *v);
  c.optimizer.seed = c.seed;

  const bool need_model = uses_model(command);
  if (need_model || r.has("model.kind")) c.model = read_model(r);
  r.choice("task", c.task, kTasks);

  if (command == Command::Optimize || command == Command::BenchRuntime) {
    c.dt = parse_real("evolution.dt", r.require("evolution.dt"));
  } else {
    r.real("evolution.dt", c.dt);
  }
  if (c.dt != 0.0) positive("evolution.dt", c.dt);
  r.count("evolution.steps", c.steps);
  at_least("evolution.steps", c.steps, 1);
  r.real("evolution.tau", c.tau);
  positive("evolution.tau", c.tau);
  if (c.tau >= 1.0) throw ParseError("evolution.tau: must be < 1");
  r.choice("evolution.backend", c.backend, kBackends);
  r.choice("evolution.storage", c.storage, kStorages);

  c.costs = read_costs(r);
  c.initial_state = read_state(r, "state.initial");
  c.target_state = read_state(r, "state.target");
  if (const auto v = r.take("gate.target")) {
    if (*v == "hadamard") {
      c.gate = GateKind::Hadamard;
    } else if (*v == "identity") {
      c.gate = GateKind::Identity;
    } else {
      c.gate = GateKind::File;
      c.gate_file = r.file("gate.target", *v);
    }
  }
  r.choice("controls.init", c.init, kInits);
  r.real("controls.amplitude", c.init_amplitude);
  if (!(c.init_amplitude >= 0.0)) throw ParseError("controls.amplitude: must be >= 0");

  auto& o = c.optimizer;
  r.count("optimizer.max_iters", o.max_iters);
  r.real("optimizer.eta0", o.eta0);
  r.choice("optimizer.schedule", o.schedule, kSchedules);
  r.real("optimizer.shrink", o.shrink);
  r.real("optimizer.grow", o.grow);
  r.real("optimizer.stop_cost", o.stop_cost);
  r.real("optimizer.stop_grad_norm", o.stop_grad_norm);
  r.count("optimizer.max_backtracks", o.max_backtracks);
  try {
    o.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }

  c.sizes = count_list(r, "bench.sizes");
  c.dts = real_list(r, "bench.dts");
  c.taus = real_list(r, "bench.taus");
  r.count("bench.reps", c.reps);
  at_least("bench.reps", c.reps, 1);
  r.choice("bench.warmup", c.warmup, kBools);
  for (double v : c.dts) positive("bench.dts", v);
  for (double v : c.taus) {
    positive("bench.taus", v);
    if (v >= 1.0) throw ParseError("bench.taus: must be < 1");
  }

  auto& a = c.advise;
  r.count("advise.d", a.d);
  r.count("advise.n_steps", a.N);
  r.choice("advise.kappa", a.kappa, kKappas);
  r.choice("advise.mu", a.mu, kMus);
  r.choice("advise.memory_ok", a.memory_budget_ok_for_ad, kBools);
  r.choice("advise.gradients_available", a.gradients_available, kBools);
  a.task = c.task;

  if (const auto v = r.take("expm.matrix")) c.expm_matrix = r.file("expm.matrix", *v);
  if (const auto v = r.take("expm.vector")) c.expm_vector = r.file("expm.vector", *v);
  r.finish();

  // Command-specific requirements.
  switch (command) {
    case Command::Optimize: {
      if (c.costs.empty()) throw ParseError("missing required key 'cost.1.kind'");
      const bool has_state = std::any_of(c.costs.begin(), c.costs.end(),
                                         [](const CostSpec& s) { return is_state_kind(s.kind); });
      const bool needs_target = std::any_of(c.costs.begin(), c.costs.end(), [](const CostSpec& s) {
        return s.kind == CostKind::StateInfidelity || s.kind == CostKind::StateRunningInfidelity;
      });
      if (needs_target && !c.target_state) throw ParseError("missing required key 'state.target'");
      if (has_state && !c.initial_state) c.initial_state = StateSpec{std::size_t{0}};
      for (const auto& s : c.costs) {
        if (s.kind == CostKind::StatePenalty && s.penalty == PenaltyKind::Leakage &&
            !std::holds_alternative<TransmonCavityParams>(c.model)) {
          throw ParseError("cost penalty 'leakage' needs model.kind = transmon_cavity");
        }
      }
      break;
    }
    case Command::BenchMu:
      if (std::holds_alternative<MatrixModel>(c.model)) {
        throw ParseError("model.kind: bench-mu sweeps need a built-in model");
      }
      if (c.sizes.empty()) throw ParseError("missing required key 'bench.sizes'");
      if (c.dts.empty()) throw ParseError("missing required key 'bench.dts'");
      if (c.taus.empty()) c.taus = {c.tau};
      break;
    case Command::BenchRuntime:
      if (std::holds_alternative<MatrixModel>(c.model)) {
        throw ParseError("model.kind: bench-runtime sweeps need a built-in model");
      }
      if (c.sizes.empty()) throw ParseError("missing required key 'bench.sizes'");
      break;
    case Command::Advise:
      break;
    case Command::Expm:
      if (c.expm_matrix.empty()) throw ParseError("missing required key 'expm.matrix'");
      if (c.expm_vector.empty()) throw ParseError("missing required key 'expm.vector'");
      break;
  }
  return c;
}

RunConfig load_config(const fs::path& path, Command command) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(parse_key_values(text.str()), command, path.parent_path());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  auto put = [&os](const std::string& key, const std::string& value) {
    os << key << " = " << value << '\n';
  };
  auto real = [&put](const std::string& key, double v) { put(key, format_real(v)); };
  auto count = [&put](const std::string& key, std::size_t v) { put(key, std::to_string(v)); };
  auto state = [&put](const std::string& key, const std::optional<StateSpec>& s) {
    if (!s) return;
    if (const auto* i = std::get_if<std::size_t>(&*s)) {
      put(key, std::to_string(*i));
    } else {
      put(key, std::get<fs::path>(*s).string());
    }
  };

  count("seed", c.seed);
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TransmonCavityParams>) {
          put("model.kind", "transmon_cavity");
          real("model.delta", p.delta);
          real("model.anharmonicity", p.anharmonicity);
          real("model.g", p.g);
          count("model.d_transmon", p.d_transmon);
          count("model.d_cavity", p.d_cavity);
          real("model.a_z", p.a_z);
          real("model.a_x", p.a_x);
        } else if constexpr (std::is_same_v<P, ThreeTransmonsParams>) {
          put("model.kind", "three_transmons");
          real("model.anharmonicity", p.anharmonicity);
          real("model.g", p.g);
          count("model.d_each", p.d_each);
          real("model.drive", p.drive);
        } else if constexpr (std::is_same_v<P, QubitChainParams>) {
          put("model.kind", "qubit_chain");
          count("model.n_qubits", p.n_qubits);
          real("model.g", p.g);
          real("model.a_x", p.a_x);
          real("model.a_y", p.a_y);
        } else if constexpr (std::is_same_v<P, FluxoniumPairParams>) {
          put("model.kind", "fluxonium_pair");
          real("model.e_c1", p.e_c1);
          real("model.e_c2", p.e_c2);
          real("model.e_j1", p.e_j1);
          real("model.e_j2", p.e_j2);
          real("model.e_l1", p.e_l1);
          real("model.e_l2", p.e_l2);
          real("model.g", p.g);
          count("model.d_each", p.d_each);
          real("model.ext_flux", p.ext_flux);
          real("model.drive", p.drive);
        } else {
          put("model.kind", "matrices");
          put("model.drift", p.drift.string());
          std::string list;
          for (const auto& f : p.controls) list += (list.empty() ? "" : ", ") + f.string();
          put("model.controls", list);
        }
      },
      c.model);
  put("task", enum_name(c.task, kTasks));

  count("evolution.steps", c.steps);
  if (c.dt != 0.0) real("evolution.dt", c.dt);
  real("evolution.tau", c.tau);
  put("evolution.backend", enum_name(c.backend, kBackends));
  put("evolution.storage", enum_name(c.storage, kStorages));

  for (std::size_t i = 0; i < c.costs.size(); ++i) {
    const auto& s = c.costs[i];
    const std::string prefix = "cost." + std::to_string(i + 1) + ".";
    put(prefix + "kind", enum_name(s.kind, kCostKinds));
    real(prefix + "weight", s.weight);
    if (s.kind == CostKind::StatePenalty) {
      if (s.penalty == PenaltyKind::Leakage) {
        put(prefix + "penalty", "leakage");
        count(prefix + "leakage_from", s.leakage_from);
      } else {
        put(prefix + "penalty", s.penalty_file.string());
      }
    }
  }
  state("state.initial", c.initial_state);
  state("state.target", c.target_state);
  switch (c.gate) {
    case GateKind::Hadamard: put("gate.target", "hadamard"); break;
    case GateKind::Identity: put("gate.target", "identity"); break;
    case GateKind::File: put("gate.target", c.gate_file.string()); break;
  }
  put("controls.init", enum_name(c.init, kInits));
  real("controls.amplitude", c.init_amplitude);

  const auto& o = c.optimizer;
  count("optimizer.max_iters", o.max_iters);
  real("optimizer.eta0", o.eta0);
  put("optimizer.schedule", enum_name(o.schedule, kSchedules));
  real("optimizer.shrink", o.shrink);
  real("optimizer.grow", o.grow);
  real("optimizer.stop_cost", o.stop_cost);
  real("optimizer.stop_grad_norm", o.stop_grad_norm);
  count("optimizer.max_backtracks", o.max_backtracks);

  auto join_counts = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : ", ") + std::to_string(x);
    return s;
  };
  auto join_reals = [](const std::vector<double>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : ", ") + format_real(x);
    return s;
  };
  if (!c.sizes.empty()) put("bench.sizes", join_counts(c.sizes));
  if (!c.dts.empty()) put("bench.dts", join_reals(c.dts));
  if (!c.taus.empty()) put("bench.taus", join_reals(c.taus));
  count("bench.reps", c.reps);
  put("bench.warmup", c.warmup ? "true" : "false");

  count("advise.d", c.advise.d);
  count("advise.n_steps", c.advise.N);
  put("advise.kappa", enum_name(c.advise.kappa, kKappas));
  put("advise.mu", enum_name(c.advise.mu, kMus));
  put("advise.memory_ok", c.advise.memory_budget_ok_for_ad ? "true" : "false");
  put("advise.gradients_available", c.advise.gradients_available ? "true" : "false");

  if (!c.expm_matrix.empty()) put("expm.matrix", c.expm_matrix.string());
  if (!c.expm_vector.empty()) put("expm.vector", c.expm_vector.string());
  return os.str();
}

std::string config_hash(const RunConfig& config) {
  const std::string text = std::string(to_string(config.command)) + "\n" + serialize_config(config);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hgrape::cli
