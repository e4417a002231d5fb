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

#include "run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <utility>

#include <nlohmann/json.hpp>

#include "hgrape/error.hpp"
#include "hgrape/expm.hpp"

namespace hgrape::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// One run per output directory at a time.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / "hgrape.lock") {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      throw Error("output directory '" + dir.string() + "' is locked by another run (" +
                  path_.string() + ")");
    }
    std::fclose(f);
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  return os;
}

void write_json(const fs::path& path, const json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
}

Model load_model(const ModelSpec& spec) {
  if (const auto* m = std::get_if<MatrixModel>(&spec)) {
    Model out;
    out.name = "matrices";
    out.drift = load_matrix(m->drift.string());
    for (const auto& f : m->controls) {
      out.controls.push_back(load_matrix(f.string()));
      out.fixture_amplitudes.push_back(0.0);
    }
    return out;
  }
  return std::visit(
      [](const auto& p) -> Model {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MatrixModel>) {
          throw Error("unreachable");
        } else {
          return build_model(ModelParams{p});
        }
      },
      spec);
}

ModelParams builtin_params(const ModelSpec& spec) {
  return std::visit(
      [](const auto& p) -> ModelParams {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MatrixModel>) {
          throw Error("sweeps need a built-in model");
        } else {
          return p;
        }
      },
      spec);
}

StateVector resolve_state(const StateSpec& s, std::size_t d, const char* what) {
  if (const auto* i = std::get_if<std::size_t>(&s)) {
    if (*i >= d) {
      throw Error(std::string(what) + ": level " + std::to_string(*i) + " >= dimension " +
                  std::to_string(d));
    }
    return StateVector::basis(d, *i);
  }
  StateVector v = load_vector(std::get<fs::path>(s).string());
  if (v.dim() != d) throw Error(std::string(what) + ": file dimension differs from the model");
  return v;
}

DenseMatrix resolve_gate(const RunConfig& c, std::size_t d) {
  switch (c.gate) {
    case GateKind::Identity:
      return DenseMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    case GateKind::File: {
      DenseMatrix g = to_dense(load_matrix(c.gate_file.string()));
      if (static_cast<std::size_t>(g.rows()) != d) {
        throw Error("gate.target: matrix dimension differs from the model");
      }
      return g;
    }
    case GateKind::Hadamard:
      break;
  }
  if (const auto* p = std::get_if<ThreeTransmonsParams>(&c.model)) {
    return hadamard_target(3, p->d_each);
  }
  if (const auto* p = std::get_if<QubitChainParams>(&c.model)) {
    return hadamard_target(p->n_qubits, 2);
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  if ((std::size_t{1} << n) != d) {
    throw Error("gate.target = hadamard needs a qubit register (dimension a power of two)");
  }
  return hadamard_target(n, 2);
}

json fit_json(const PowerLawFit& f) {
  return {{"exponent", f.exponent}, {"log_prefactor", f.log_prefactor}, {"r_squared", f.r_squared}};
}

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

void write_bench(const fs::path& dir, const std::string& hash,
                 const std::vector<BenchRecord>& records, bool include_wall) {
  auto os = open_output(dir / "bench.csv");
  os << "# config_hash=" << hash << '\n';
  write_bench_csv(os, records, include_wall);
}

json failures_json(const std::vector<BenchRecord>& records) {
  json out = json::array();
  for (const auto& r : records) {
    if (!r.ok()) out.push_back({{"d", r.d}, {"tau", r.tau}, {"error", r.error}});
  }
  return out;
}

int run_optimize(const RunConfig& c, const RunOptions& opt, const std::string& hash) {
  const ProblemSetup setup = build_problem(c);
  const OptimizationTrace trace =
      grape_optimize(setup.problem, setup.terms, setup.initial_controls, c.optimizer);
  if (!opt.out_dir.empty()) {
    {
      auto os = open_output(opt.out_dir / "trace.csv");
      os << "# config_hash=" << hash << '\n';
      write_trace_csv(os, trace, opt.include_wall);
    }
    json controls = json::array();
    const auto& a = trace.final_controls;
    for (std::size_t n = 0; n < a.n_steps(); ++n) {
      json row = json::array();
      for (std::size_t k = 0; k < a.n_channels(); ++k) row.push_back(a(n, k));
      controls.push_back(row);
    }
    json summary = {{"command", "optimize"},
                    {"config_hash", hash},
                    {"dim", setup.problem.dim()},
                    {"steps", a.n_steps()},
                    {"channels", a.n_channels()},
                    {"dt", a.dt},
                    {"iterations", trace.records.empty() ? 0 : trace.records.back().iter},
                    {"final_cost", trace.records.empty() ? NAN : trace.records.back().cost},
                    {"stop_reason", to_string(trace.reason)},
                    {"final_controls", controls}};
    if (!trace.error.empty()) summary["error"] = trace.error;
    write_json(opt.out_dir / "summary.json", summary);
  }
  if (trace.reason == StopReason::EvaluationFailed) {
    throw Error("cost evaluation failed: " + trace.error);
  }
  return 0;
}

int run_bench_mu(const RunConfig& c, const RunOptions& opt, const std::string& hash) {
  const ModelParams base = builtin_params(c.model);
  std::vector<BenchRecord> records;
  json fits = json::array();
  for (double tau : c.taus) {
    std::map<std::size_t, std::vector<Point>> by_size;  // mu vs |A|_1 per size
    for (double dt : c.dts) {
      std::vector<Point> vs_d;
      std::vector<Point> vs_log_d;
      for (std::size_t size : c.sizes) {
        BenchRecord r = measure_mu(with_model_size(base, size), dt, tau);
        if (r.ok()) {
          vs_d.push_back({static_cast<double>(r.d), static_cast<double>(r.mu)});
          vs_log_d.push_back({std::log2(static_cast<double>(r.d)), static_cast<double>(r.mu)});
          by_size[size].push_back({r.norm1, static_cast<double>(r.mu)});
        }
        records.push_back(std::move(r));
      }
      if (vs_d.size() >= 4) {
        fits.push_back({{"tau", tau},
                        {"dt", dt},
                        {"mu_vs_d_power_law", fit_json(fit_power_law(vs_d))},
                        {"mu_vs_log2_d_linear", fit_json(fit_linear(vs_log_d))}});
      }
    }
    for (const auto& [size, pts] : by_size) {
      if (pts.size() >= 4) {
        fits.push_back({{"tau", tau}, {"size", size}, {"mu_vs_norm1_linear", fit_json(fit_linear(pts))}});
      }
    }
  }
  write_bench(opt.out_dir, hash, records, opt.include_wall);
  write_json(opt.out_dir / "summary.json", {{"command", "bench-mu"},
                                            {"config_hash", hash},
                                            {"model", model_name(base)},
                                            {"fits", fits},
                                            {"failures", failures_json(records)}});
  return 0;
}

int run_bench_runtime(const RunConfig& c, const RunOptions& opt, const std::string& hash) {
  const ModelParams base = builtin_params(c.model);
  RuntimeOptions ro;
  ro.dt = c.dt;
  ro.n_steps = c.steps;
  ro.reps = c.reps;
  ro.warmup = c.warmup;
  ro.backend = c.backend;
  ro.storage = c.storage;
  std::vector<BenchRecord> records;
  std::vector<Point> pts;
  for (std::size_t size : c.sizes) {
    BenchRecord r = measure_step_runtime(with_model_size(base, size), c.task, c.tau, ro);
    if (r.ok()) pts.push_back({static_cast<double>(r.d), static_cast<double>(r.wall_ns)});
    records.push_back(std::move(r));
  }
  json summary = {{"command", "bench-runtime"},
                  {"config_hash", hash},
                  {"model", model_name(base)},
                  {"task", to_string(c.task)},
                  {"failures", failures_json(records)}};
  if (pts.size() >= 4) {
    summary["runtime_vs_d_power_law"] = fit_json(fit_power_law(pts));
  }
  write_bench(opt.out_dir, hash, records, opt.include_wall);
  write_json(opt.out_dir / "summary.json", summary);
  return 0;
}

int run_advise(const RunConfig& c, const RunOptions& opt, const std::string& hash,
               std::ostream& out) {
  StrategyInputs in = c.advise;
  in.task = c.task;
  const StrategyRecommendation rec = strategy_advise(in);
  const json j = {{"method", to_string(rec.method)},
                  {"rationale", rec.rationale},
                  {"inputs",
                   {{"d", in.d},
                    {"n_steps", in.N},
                    {"kappa", to_string(in.kappa)},
                    {"mu", to_string(in.mu)},
                    {"task", to_string(in.task)},
                    {"memory_ok", in.memory_budget_ok_for_ad},
                    {"gradients_available", in.gradients_available}}},
                  {"config_hash", hash}};
  out << j.dump(2) << '\n';
  if (!opt.out_dir.empty()) write_json(opt.out_dir / "summary.json", j);
  return 0;
}

int run_expm(const RunConfig& c, const RunOptions& opt, const std::string& hash, std::ostream& out) {
  const SparseComplexMatrix a = load_matrix(c.expm_matrix.string());
  const StateVector v = load_vector(c.expm_vector.string());
  const ExpmResult r = expm_multiply(a, v, c.tau);
  json state = json::array();
  for (std::size_t i = 0; i < r.state.dim(); ++i) {
    state.push_back({r.state[i].real(), r.state[i].imag()});
  }
  const json j = {{"dim", r.state.dim()},
                  {"tau", c.tau},
                  {"norm1", r.plan.norm1},
                  {"sigma_prime", r.plan.sigma_prime},
                  {"m", r.plan.m},
                  {"s", r.plan.s},
                  {"mu", r.mu},
                  {"bound", r.plan.bound},
                  {"state", state},
                  {"config_hash", hash}};
  out << j.dump(2) << '\n';
  if (!opt.out_dir.empty()) write_json(opt.out_dir / "summary.json", j);
  return 0;
}

}  // namespace

ProblemSetup build_problem(const RunConfig& c) {
  if (c.dt <= 0.0) throw Error("evolution.dt must be set for optimization problems");
  Model model = load_model(c.model);
  const std::size_t d = model.dim();
  ControlProblem problem(model.drift, model.controls, c.backend, c.tau, c.storage);

  std::vector<CostTerm> terms;
  for (const auto& s : c.costs) {
    switch (s.kind) {
      case CostKind::StateInfidelity:
        terms.push_back(CostTerm::state_infidelity(resolve_state(*c.target_state, d, "state.target"),
                                                   s.weight));
        break;
      case CostKind::StateRunningInfidelity:
        terms.push_back(CostTerm::state_running_infidelity(
            resolve_state(*c.target_state, d, "state.target"), s.weight));
        break;
      case CostKind::StatePenalty:
        if (s.penalty == PenaltyKind::Leakage) {
          terms.push_back(CostTerm::state_penalty(
              transmon_leakage_projector(std::get<TransmonCavityParams>(c.model), s.leakage_from),
              s.weight));
        } else {
          terms.push_back(CostTerm::state_penalty(load_matrix(s.penalty_file.string()), s.weight));
        }
        break;
      case CostKind::GateInfidelity:
        terms.push_back(CostTerm::gate_infidelity(resolve_gate(c, d), s.weight));
        break;
      case CostKind::GateRunningInfidelity:
        terms.push_back(CostTerm::gate_running_infidelity(resolve_gate(c, d), s.weight));
        break;
    }
    terms.back().validate(d);
  }
  if (c.initial_state) problem.initial_state = resolve_state(*c.initial_state, d, "state.initial");

  const std::size_t k = model.controls.size();
  ControlField a0(c.steps, k, c.dt);
  switch (c.init) {
    case InitKind::Zero:
      break;
    case InitKind::Fixture:
      for (std::size_t n = 0; n < c.steps; ++n) {
        for (std::size_t j = 0; j < k; ++j) a0(n, j) = model.fixture_amplitudes[j];
      }
      break;
    case InitKind::Random:
      a0 = random_controls(c.steps, k, c.dt, c.init_amplitude, c.seed);
      break;
  }
  return {std::move(problem), std::move(terms), std::move(a0)};
}

int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const std::string hash = config_hash(config);
    const bool needs_dir = config.command == Command::Optimize ||
                           config.command == Command::BenchMu ||
                           config.command == Command::BenchRuntime;
    if (needs_dir && options.out_dir.empty()) {
      throw Error(std::string(to_string(config.command)) + " needs an output directory (--out)");
    }
    std::optional<DirectoryLock> lock;
    if (!options.out_dir.empty()) lock.emplace(options.out_dir);
    switch (config.command) {
      case Command::Optimize: return run_optimize(config, options, hash);
      case Command::BenchMu: return run_bench_mu(config, options, hash);
      case Command::BenchRuntime: return run_bench_runtime(config, options, hash);
      case Command::Advise: return run_advise(config, options, hash, out);
      case Command::Expm: return run_expm(config, options, hash, out);
    }
    return 2;
  } catch (const std::exception& e) {
    err << "hgrape " << to_string(config.command) << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hgrape::cli
