#include <CLI11.hpp>
#include <Eigen/Core>

#include <cstdlib>
#include <iostream>
#include <string>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sublin: semilinear Dirichlet problems, exhaustion limits and blow-up sweeps on lattices"};
  app.require_subcommand(1);

  sublin::cli::RunOptions options;
  std::string out_dir;
  unsigned long long seed = 0;
  for (const std::string& name : sublin::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config_path, "run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "seed for randomized sampling");
    sub->add_flag("--verbose", options.verbose, "progress messages on stderr");
    sub->callback([&options, name] { options.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sublin::cli::kConfigError;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--out")) options.out_dir = out_dir;
    if (sub->count("--seed")) options.seed = seed;
  }

  if (const char* threads = std::getenv("SUBLIN_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }
  return sublin::cli::run_command(options, std::cout, std::cerr);
}
