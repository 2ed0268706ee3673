#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "twobsde/config.hpp"

namespace twobsde::cli {

enum ExitCode : int {
  kPass = 0,
  kPropertyFailure = 1,
  kConfigError = 2,
  kStabilityError = 3,
  kDomainError = 4,
};

int cmd_conjugate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_solve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_counterexample(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_convergence(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Loads the config, dispatches `command` and maps exceptions onto exit codes.
/// An empty `out` falls back to the config's output_dir.
int run(const std::string& command, const std::filesystem::path& config,
        const std::filesystem::path& out, std::ostream& log, std::ostream& err);

}  // namespace twobsde::cli
