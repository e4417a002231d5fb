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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "hgrape/error.hpp"
#include "run.hpp"

namespace {

using hgrape::cli::Command;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::string matrix;
  std::string vector;
  bool no_wall = false;
};

CLI::App* add_command(CLI::App& app, const char* name, const char* help, Flags& flags,
                      bool config_required) {
  CLI::App* sub = app.add_subcommand(name, help);
  auto* cfg = sub->add_option("--config", flags.config, "Run configuration (key = value lines)")
                  ->check(CLI::ExistingFile);
  if (config_required) cfg->required();
  sub->add_option("--out", flags.out, "Output directory");
  sub->add_option("--seed", flags.seed, "Override the config seed");
  sub->add_option("--tau", flags.tau, "Override evolution.tau");
  sub->add_flag("--no-wall", flags.no_wall, "Write 0 in wall-time columns (reproducible CSVs)");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hgrape: GRAPE optimal control with hard-coded gradients"};
  app.require_subcommand(1);
  Flags flags;
  add_command(app, "optimize", "Steepest-descent pulse optimization", flags, true);
  add_command(app, "bench-mu", "Sweep mu against dimension, time step and tolerance", flags, true);
  add_command(app, "bench-runtime", "Time one gradient evaluation across dimensions", flags, true);
  add_command(app, "advise", "Recommend a gradient strategy", flags, true);
  CLI::App* expm = add_command(app, "expm", "Apply exp(A) to a vector", flags, false);
  expm->add_option("--matrix", flags.matrix, "Matrix file (A itself, anti-Hermitian)")
      ->check(CLI::ExistingFile);
  expm->add_option("--vector", flags.vector, "Vector file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  const Command command = name == "optimize"        ? Command::Optimize
                          : name == "bench-mu"      ? Command::BenchMu
                          : name == "bench-runtime" ? Command::BenchRuntime
                          : name == "advise"        ? Command::Advise
                                                    : Command::Expm;
  try {
    hgrape::cli::KeyValues kv;
    std::filesystem::path base;
    if (!flags.config.empty()) {
      kv = hgrape::cli::parse_key_values([&] {
        std::ifstream in(flags.config);
        return std::string(std::istreambuf_iterator<char>(in), {});
      }());
      base = std::filesystem::path(flags.config).parent_path();
    }
    // Flags override config keys before validation.
    if (flags.seed) kv["seed"] = std::to_string(*flags.seed);
    if (flags.tau) kv["evolution.tau"] = [&] {
      std::ostringstream os;
      os.precision(17);
      os << *flags.tau;
      return os.str();
    }();
    if (!flags.matrix.empty()) kv["expm.matrix"] = std::filesystem::absolute(flags.matrix).string();
    if (!flags.vector.empty()) kv["expm.vector"] = std::filesystem::absolute(flags.vector).string();

    const hgrape::cli::RunConfig config = hgrape::cli::parse_config(kv, command, base);
    hgrape::cli::RunOptions options;
    options.out_dir = flags.out;
    options.include_wall = !flags.no_wall;
    return hgrape::cli::run(config, options, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "hgrape " << name << ": " << e.what() << '\n';
    return 1;
  }
}
