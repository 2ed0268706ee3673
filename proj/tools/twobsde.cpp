#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "twobsde/cli.hpp"
#include "twobsde/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lattice solvers for second order BSDEs"};
  app.set_version_flag("--version", twobsde::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string out;
  const char* commands[][2] = {
      {"conjugate", "Tabulate the conjugate F and the biconjugate hhat"},
      {"solve", "Solve a BSDE, 2BSDE or PDE on the lattice"},
      {"verify", "Run property suites; exit 1 on any failure"},
      {"counterexample", "Simulate the non-uniqueness counterexample"},
      {"convergence", "Refinement study over a ladder of grids"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (defaults to the config's output_dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : twobsde::cli::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return twobsde::cli::run(command, config, out, std::cout, std::cerr);
}
