#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twobsde/control.hpp"
#include "twobsde/generators.hpp"
#include "twobsde/grid.hpp"
#include "twobsde/payoff.hpp"

namespace twobsde::cli {

struct ReactionConfig {
  /// none | constant | linear_y | linear_yz | abs_z
  std::string type = "none";
  double value = 0.0;   // constant
  double lambda = 0.0;  // coefficient of y
  double mu = 0.0;      // coefficient of z (or |z|)
};

struct GeneratorConfig {
  /// single_vol | g_range | gamma_band
  std::string kind;
  double a0 = 1.0;
  double a_lo = 1.0;
  double a_hi = 1.0;
  double gamma_lo = -1.0;
  double gamma_hi = 1.0;
  ReactionConfig reaction;
};

struct LatticeConfig {
  int n_steps = 200;
  double center = 0.0;
  /// Defaults to 6 sqrt(max control rate).
  double half_width = 0.0;
  int n_points = 401;
  int quadrature_nodes = 16;
};

struct ScenarioConfig {
  /// constant | piecewise | optimal
  std::string type = "constant";
  double a = 1.0;
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::string label;
};

struct RunConfig {
  GeneratorConfig generator;
  LatticeConfig lattice;
  std::vector<double> control_grid;
  std::vector<ScenarioConfig> scenarios;
  nlohmann::json payoff;
  nlohmann::json task = nlohmann::json::object();
  std::string output_dir = "out";
  std::uint64_t seed = 20240601;
  /// Integrability exponent of the continuous theory; no role on a lattice.
  double kappa = 1.5;
  std::uint64_t config_hash = 0;
  /// Compact JSON of the parsed document, echoed into report headers.
  std::string canonical;
};

/// Validates against the schema and fills defaults. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

GeneratorSpec make_generator(const GeneratorConfig& cfg);
Reaction make_reaction(const ReactionConfig& cfg);
Payoff make_payoff(const nlohmann::json& desc);
TimeGrid make_time_grid(const RunConfig& cfg);
SpaceGrid make_space_grid(const RunConfig& cfg);
QuadratureRule make_quadrature(const RunConfig& cfg);
ControlGrid make_control_grid(const RunConfig& cfg);
/// `optimal` scenarios resolve to `optimal` when given, and are skipped otherwise.
std::vector<ControlScenario> make_scenarios(const RunConfig& cfg,
                                            const std::optional<ControlScenario>& optimal);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace twobsde::cli
