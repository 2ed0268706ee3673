#include "twobsde/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double number(const json& obj, const std::string& where, const std::string& key, double fallback,
              double lo = -INFINITY, double hi = INFINITY) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d) || d < lo || d > hi) {
    std::ostringstream os;
    os << where << "." << key << " = " << d << " outside [" << lo << ", " << hi << "]";
    throw ConfigError(os.str());
  }
  return d;
}

double required_number(const json& obj, const std::string& where, const std::string& key,
                       double lo = -INFINITY, double hi = INFINITY) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  return number(obj, where, key, 0.0, lo, hi);
}

int integer(const json& obj, const std::string& where, const std::string& key, int fallback,
            int lo, int hi) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  const auto i = v.get<long long>();
  if (i < lo || i > hi)
    throw ConfigError(where + "." + key + " = " + std::to_string(i) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(i);
}

std::vector<double> number_list(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) return {};
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string string_of(const json& obj, const std::string& where, const std::string& key,
                      const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

ReactionConfig parse_reaction(const json& j) {
  const std::string where = "generator.reaction";
  check_keys(j, where, {"type", "value", "lambda", "mu"});
  ReactionConfig r;
  r.type = string_of(j, where, "type", "none");
  static const std::set<std::string> types{"none", "constant", "linear_y", "linear_yz", "abs_z"};
  if (!types.contains(r.type)) throw ConfigError(where + ".type: unknown reaction '" + r.type + "'");
  r.value = number(j, where, "value", 0.0, -1e6, 1e6);
  r.lambda = number(j, where, "lambda", 0.0, -1e6, 1e6);
  r.mu = number(j, where, "mu", 0.0, -1e6, 1e6);
  return r;
}

GeneratorConfig parse_generator(const json& j) {
  const std::string where = "generator";
  check_keys(j, where, {"kind", "a0", "a_lo", "a_hi", "gamma_lo", "gamma_hi", "reaction"});
  GeneratorConfig g;
  g.kind = string_of(j, where, "kind", "");
  if (g.kind == "single_vol") {
    g.a0 = required_number(j, where, "a0", 1e-8, 1e6);
  } else if (g.kind == "g_range") {
    g.a_lo = required_number(j, where, "a_lo", 1e-8, 1e6);
    g.a_hi = required_number(j, where, "a_hi", 1e-8, 1e6);
    if (g.a_lo > g.a_hi) throw ConfigError("generator: a_lo must not exceed a_hi");
  } else if (g.kind == "gamma_band") {
    g.gamma_lo = required_number(j, where, "gamma_lo", -1e6, 1e6);
    g.gamma_hi = required_number(j, where, "gamma_hi", -1e6, 1e6);
    if (!(g.gamma_lo < 0.0 && g.gamma_hi > 0.0))
      throw ConfigError("generator: gamma_band requires gamma_lo < 0 < gamma_hi");
  } else {
    throw ConfigError("generator.kind must be one of single_vol, g_range, gamma_band");
  }
  if (j.contains("reaction")) g.reaction = parse_reaction(j.at("reaction"));
  return g;
}

ScenarioConfig parse_scenario(const json& j, std::size_t index) {
  const std::string where = "controls.scenarios[" + std::to_string(index) + "]";
  check_keys(j, where, {"type", "a", "breakpoints", "values", "label"});
  ScenarioConfig s;
  s.type = string_of(j, where, "type", "constant");
  s.label = string_of(j, where, "label", "");
  if (s.type == "constant") {
    s.a = required_number(j, where, "a", 1e-8, 1e6);
  } else if (s.type == "piecewise") {
    s.breakpoints = number_list(j, where, "breakpoints");
    s.values = number_list(j, where, "values");
    if (s.values.size() != s.breakpoints.size() + 1)
      throw ConfigError(where + ": piecewise needs one more value than breakpoints");
  } else if (s.type != "optimal") {
    throw ConfigError(where + ".type must be constant, piecewise or optimal");
  }
  return s;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, "config",
             {"generator", "lattice", "controls", "payoff", "task", "output_dir", "seed", "kappa"});
  RunConfig cfg;
  if (!doc.contains("generator")) throw ConfigError("config: missing required block 'generator'");
  cfg.generator = parse_generator(doc.at("generator"));

  if (doc.contains("controls")) {
    const json& c = doc.at("controls");
    check_keys(c, "controls", {"grid", "scenarios"});
    cfg.control_grid = number_list(c, "controls", "grid");
    for (double a : cfg.control_grid)
      if (!(a > 0.0)) throw ConfigError("controls.grid: values must be positive");
    if (c.contains("scenarios")) {
      if (!c.at("scenarios").is_array()) throw ConfigError("controls.scenarios: expected an array");
      std::size_t i = 0;
      for (const auto& s : c.at("scenarios")) cfg.scenarios.push_back(parse_scenario(s, i++));
    }
  }
  if (cfg.control_grid.empty()) {
    const auto& g = cfg.generator;
    if (g.kind == "single_vol") {
      cfg.control_grid = {g.a0};
    } else if (g.kind == "g_range") {
      cfg.control_grid = g.a_lo == g.a_hi ? std::vector<double>{g.a_lo} : linspace(g.a_lo, g.a_hi, 8);
    } else {
      throw ConfigError("controls.grid is required for gamma_band (D_F is unbounded; truncate it)");
    }
  }

  const double a_max = *std::max_element(cfg.control_grid.begin(), cfg.control_grid.end());
  if (doc.contains("lattice")) {
    const json& l = doc.at("lattice");
    const std::string where = "lattice";
    check_keys(l, where, {"n_steps", "center", "half_width", "n_points", "quadrature_nodes"});
    cfg.lattice.n_steps = integer(l, where, "n_steps", 200, 1, 1000000);
    cfg.lattice.center = number(l, where, "center", 0.0, -1e6, 1e6);
    cfg.lattice.half_width = number(l, where, "half_width", 0.0, 0.0, 1e6);
    cfg.lattice.n_points = integer(l, where, "n_points", 401, 3, 2000001);
    cfg.lattice.quadrature_nodes = integer(l, where, "quadrature_nodes", 16, 1, 64);
    if (cfg.lattice.n_points % 2 == 0) throw ConfigError("lattice.n_points must be odd");
  }
  if (cfg.lattice.half_width <= 0.0) cfg.lattice.half_width = 6.0 * std::sqrt(a_max);

  cfg.payoff = doc.contains("payoff") ? doc.at("payoff") : json{{"name", "call"}, {"strike", 0.0}};
  make_payoff(cfg.payoff);  // validates

  if (doc.contains("task")) {
    if (!doc.at("task").is_object()) throw ConfigError("task: expected an object");
    cfg.task = doc.at("task");
  }
  cfg.output_dir = string_of(doc, "config", "output_dir", "out");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  cfg.kappa = number(doc, "config", "kappa", 1.5, 1.0, 2.0);
  if (!(cfg.kappa > 1.0)) throw ConfigError("kappa must lie in (1, 2]");
  cfg.canonical = doc.dump();
  cfg.config_hash = fnv1a(cfg.canonical);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

Reaction make_reaction(const ReactionConfig& r) {
  if (r.type == "none") return {};
  if (r.type == "constant") {
    const double c = r.value;
    return [c](double, double, double, double) { return c; };
  }
  if (r.type == "linear_y") {
    const double l = r.lambda;
    return [l](double, double, double y, double) { return l * y; };
  }
  if (r.type == "linear_yz") {
    const double l = r.lambda, m = r.mu;
    return [l, m](double, double, double y, double z) { return l * y + m * z; };
  }
  const double m = r.mu;
  return [m](double, double, double, double z) { return m * std::abs(z); };
}

GeneratorSpec make_generator(const GeneratorConfig& g) {
  Reaction reaction = make_reaction(g.reaction);
  if (g.kind == "single_vol") return GeneratorSpec::single_vol(g.a0, reaction);
  if (g.kind == "g_range") return GeneratorSpec::g_range(g.a_lo, g.a_hi, reaction);
  return GeneratorSpec::gamma_band(g.gamma_lo, g.gamma_hi, reaction);
}

Payoff make_payoff(const json& d) {
  const std::string where = "payoff";
  if (!d.is_object()) throw ConfigError("payoff: expected an object");
  const std::string name = string_of(d, where, "name", "");
  if (name == "call" || name == "put") {
    check_keys(d, where, {"name", "strike"});
    const double k = number(d, where, "strike", 0.0);
    return name == "call" ? Payoff::call(k) : Payoff::put(k);
  }
  if (name == "callspread") {
    check_keys(d, where, {"name", "k1", "k2"});
    const double k1 = required_number(d, where, "k1"), k2 = required_number(d, where, "k2");
    if (!(k1 < k2)) throw ConfigError("payoff: callspread requires k1 < k2");
    return Payoff::callspread(k1, k2);
  }
  if (name == "abs" || name == "square" || name == "neg_square") {
    check_keys(d, where, {"name"});
    if (name == "abs") return Payoff::abs();
    return name == "square" ? Payoff::square() : Payoff::neg_square();
  }
  if (name == "linear") {
    check_keys(d, where, {"name", "beta"});
    return Payoff::linear(number(d, where, "beta", 1.0));
  }
  if (name == "butterfly") {
    check_keys(d, where, {"name", "strike", "wing"});
    const double w = required_number(d, where, "wing", 1e-12);
    return Payoff::butterfly(number(d, where, "strike", 0.0), w);
  }
  if (name == "constant") {
    check_keys(d, where, {"name", "value"});
    return Payoff::constant(number(d, where, "value", 0.0));
  }
  if (name == "table") {
    check_keys(d, where, {"name", "x", "y"});
    std::vector<double> xs = number_list(d, where, "x"), ys = number_list(d, where, "y");
    if (xs.size() < 2 || xs.size() != ys.size())
      throw ConfigError("payoff: table needs equally long x and y arrays with >= 2 entries");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) throw ConfigError("payoff: table x must increase");
    return Payoff::table(std::move(xs), std::move(ys));
  }
  throw ConfigError("payoff.name '" + name +
                    "' is not one of call, put, callspread, abs, square, neg_square, linear, "
                    "butterfly, constant, table");
}

TimeGrid make_time_grid(const RunConfig& cfg) { return TimeGrid(cfg.lattice.n_steps); }

SpaceGrid make_space_grid(const RunConfig& cfg) {
  return SpaceGrid(cfg.lattice.center, cfg.lattice.half_width, cfg.lattice.n_points);
}

QuadratureRule make_quadrature(const RunConfig& cfg) {
  return QuadratureRule::gauss_hermite(cfg.lattice.quadrature_nodes);
}

ControlGrid make_control_grid(const RunConfig& cfg) { return ControlGrid(cfg.control_grid); }

std::vector<ControlScenario> make_scenarios(const RunConfig& cfg,
                                            const std::optional<ControlScenario>& optimal) {
  std::vector<ControlScenario> out;
  for (const auto& s : cfg.scenarios) {
    if (s.type == "optimal") {
      if (!optimal) continue;
      ControlScenario sc = *optimal;
      sc.set_label(s.label.empty() ? "optimal" : s.label);
      out.push_back(std::move(sc));
      continue;
    }
    ControlScenario sc = s.type == "constant" ? ControlScenario::constant(s.a)
                                              : ControlScenario::piecewise(s.breakpoints, s.values);
    if (!s.label.empty()) sc.set_label(s.label);
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace twobsde::cli
