// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front-end: ssvqd <fci|ssvqd|savqd|gradcheck|overlap-check> [--config PATH] [--output DIR] [--seed INT]

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "ssvqd/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Orbital-optimized excited-state solvers by exact state-vector simulation"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;

  const char* names[] = {"fci", "ssvqd", "savqd", "gradcheck", "overlap-check"};
  const char* help[] = {"reference eigenpairs of the full Hamiltonian", "state-specific orbital-optimized solver",
                        "state-averaged orbital-optimized solver", "analytic gradients vs finite differences",
                        "exterior-algebra identities"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
    if (i < 3) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ssvqd::cli::kConfigError;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  ssvqd::cli::RunConfig config;
  if (!config_path.empty()) {
    try {
      config = ssvqd::cli::load_config(config_path);
    } catch (const ssvqd::Error& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return ssvqd::cli::kConfigError;
    }
  }
  if (seed) config.optimizer.seed = *seed;
  if (output_dir.empty()) output_dir = config.output_dir;

  const int code = ssvqd::cli::run(subcommand, config, output_dir, std::cerr);
  if (code == ssvqd::cli::kOk || code == ssvqd::cli::kNotConverged || code == ssvqd::cli::kInvariantViolation)
    std::cout << "wrote " << output_dir << "/summary.json (exit " << code << ")\n";
  return code;
}
