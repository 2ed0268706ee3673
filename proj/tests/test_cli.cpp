#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "twobsde/cli.hpp"

namespace fs = std::filesystem;
using namespace twobsde::cli;
using nlohmann::json;

namespace {

struct Run {
  int code;
  fs::path out;
  std::string log;
  std::string err;
};

Run run_with(const std::string& command, const json& cfg, const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "twobsde_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "config.json";
  std::ofstream(cfg_path) << cfg.dump(2);
  std::ostringstream log, err;
  const int code = run(command, cfg_path, dir / "out", log, err);
  return {code, dir / "out", log.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of a CSV after the comment line and the column header.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::vector<std::vector<std::string>> out;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

std::map<std::string, std::string> summary(const fs::path& p) {
  std::map<std::string, std::string> m;
  for (const auto& r : rows(p)) m[r[0]] = r[1];
  return m;
}

json g_range_cfg() {
  return json{{"generator", {{"kind", "g_range"}, {"a_lo", 1.0}, {"a_hi", 4.0}}},
              {"lattice", {{"n_steps", 200}, {"half_width", 12.0}, {"n_points", 1201}}},
              {"controls", {{"grid", {1.0, 4.0}}}},
              {"payoff", {{"name", "call"}, {"strike", 0.0}}}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("schema violations exit with code 2") {
  json cfg = g_range_cfg();
  cfg["bogus"] = 1;
  CHECK(run_with("solve", cfg, "unknown_key").code == kConfigError);

  cfg = g_range_cfg();
  cfg["lattice"]["n_points"] = 400;
  CHECK(run_with("solve", cfg, "even_points").code == kConfigError);

  cfg = g_range_cfg();
  cfg.erase("generator");
  CHECK(run_with("solve", cfg, "no_generator").code == kConfigError);

  cfg = json{{"generator", {{"kind", "gamma_band"}, {"gamma_lo", -1.0}, {"gamma_hi", 2.0}}}};
  CHECK(run_with("solve", cfg, "band_without_grid").code == kConfigError);

  cfg = g_range_cfg();
  cfg["payoff"] = {{"name", "digital"}};
  CHECK(run_with("solve", cfg, "bad_payoff").code == kConfigError);

  cfg = g_range_cfg();
  cfg["kappa"] = 3.0;
  CHECK(run_with("solve", cfg, "bad_kappa").code == kConfigError);

  cfg = g_range_cfg();
  cfg["task"] = {{"study", "bachelier_call"}, {"ladder", {{50, 241}, {100, 481}}}};
  CHECK(run_with("convergence", cfg, "short_ladder").code == kConfigError);

  const fs::path bad = fs::temp_directory_path() / "twobsde_cli_tests" / "bad.json";
  fs::create_directories(bad.parent_path());
  std::ofstream(bad) << "{ not json";
  std::ostringstream log, err;
  CHECK(run("solve", bad, {}, log, err) == kConfigError);
}

TEST_CASE("stability and domain errors") {
  json cfg = g_range_cfg();
  cfg["generator"]["reaction"] = {{"type", "linear_y"}, {"lambda", 500.0}};
  cfg["lattice"]["n_steps"] = 10;
  const auto r = run_with("solve", cfg, "cfl");
  CHECK(r.code == kStabilityError);
  CHECK(r.err.find("admissible dt") != std::string::npos);

  cfg = g_range_cfg();
  cfg["controls"]["grid"] = {1.0, 4.0, 5.0};
  CHECK(run_with("solve", cfg, "outside_domain").code == kDomainError);
}

TEST_CASE("conjugate tables") {
  json cfg{{"generator", {{"kind", "gamma_band"}, {"gamma_lo", -1.0}, {"gamma_hi", 2.0}}},
           {"controls", {{"grid", {0.5, 1.0, 2.0}}}},
           {"task", {{"a_grid", {{"lo", 0.1}, {"hi", 5.0}, {"n", 50}}}, {"gamma_grid", {-3.0, 0.0, 1.0, 3.0}}}}};
  auto r = run_with("conjugate", cfg, "conj_band");
  REQUIRE(r.code == kPass);
  const auto f = rows(r.out / "conjugate.csv");
  CHECK(f.size() == 50);
  for (const auto& row : f) {
    const double a = std::stod(row[0]);
    CHECK(std::stod(row[1]) == doctest::Approx(0.5 * (2.0 * std::max(a - 1.0, 0.0) + std::max(1.0 - a, 0.0))));
  }
  const auto h = rows(r.out / "biconjugate.csv");
  CHECK(h[0][1] == "-0.5");
  CHECK(h[3][2] == "1");

  cfg = json{{"generator", {{"kind", "g_range"}, {"a_lo", 1.0}, {"a_hi", 4.0}}},
             {"task", {{"a_grid", {0.5, 1.0, 2.0, 4.0, 5.0}}}}};
  r = run_with("conjugate", cfg, "conj_range");
  REQUIRE(r.code == kPass);
  const auto g = rows(r.out / "conjugate.csv");
  REQUIRE(g.size() == 3);
  for (const auto& row : g) CHECK(std::stod(row[1]) == 0.0);

  cfg = json{{"generator", {{"kind", "single_vol"}, {"a0", 1.0}}},
             {"task", {{"gamma_grid", {{"lo", -2.0}, {"hi", 2.0}, {"n", 9}}}}}};
  r = run_with("conjugate", cfg, "conj_single");
  REQUIRE(r.code == kPass);
  for (const auto& row : rows(r.out / "biconjugate.csv"))
    CHECK(std::stod(row[1]) == doctest::Approx(0.5 * std::stod(row[0])));
}

TEST_CASE("solve dispatches to each solver") {
  json cfg = g_range_cfg();
  cfg["controls"]["scenarios"] = {{{"type", "optimal"}}, {{"type", "constant"}, {"a", 1.0}, {"label", "low"}}};
  cfg["task"] = {{"solver", "2bsde"}};
  auto r = run_with("solve", cfg, "solve_2bsde");
  REQUIRE(r.code == kPass);
  auto s = summary(r.out / "summary.csv");
  CHECK(std::abs(std::stod(s["Y0"]) - 2.0 / std::sqrt(2.0 * std::numbers::pi)) <= 5e-3);
  CHECK(std::stod(s["minimum_condition_gap"]) <= 1e-8);
  CHECK(s.contains("argmax_edge_fraction"));
  CHECK(fs::exists(r.out / "k_optimal.csv"));
  CHECK(fs::exists(r.out / "k_low.csv"));

  cfg = json{{"generator", {{"kind", "single_vol"}, {"a0", 1.0}}},
             {"lattice", {{"n_steps", 100}, {"half_width", 8.0}, {"n_points", 801}}},
             {"payoff", {{"name", "square"}}},
             {"task", {{"solver", "bsde"}}}};
  r = run_with("solve", cfg, "solve_bsde");
  REQUIRE(r.code == kPass);
  CHECK(std::abs(std::stod(summary(r.out / "summary.csv")["Y0"]) - 1.0) <= 5e-3);

  cfg = g_range_cfg();
  cfg["lattice"] = {{"n_steps", 200}, {"half_width", 14.0}, {"n_points", 2801}};
  cfg["task"] = {{"solver", "pde"}, {"source", "manufactured"}};
  r = run_with("solve", cfg, "solve_pde");
  REQUIRE(r.code == kPass);
  s = summary(r.out / "summary.csv");
  CHECK(std::stod(s["max_error"]) < 0.05);
  CHECK(std::stod(s["order_dt"]) >= 1.0);
}

TEST_CASE("verify suites and exit codes") {
  json cfg = g_range_cfg();
  cfg["lattice"] = {{"n_steps", 50}, {"half_width", 8.0}, {"n_points", 321}};
  cfg["task"] = {{"suites", {"comparison", "duality", "representation", "feynman-kac", "apriori"}},
                 {"pairs", {{{{"name", "constant"}, {"value", 0.0}}, {{"name", "constant"}, {"value", 1.0}}}}}};
  auto r = run_with("verify", cfg, "verify_pass");
  CHECK(r.code == kPass);
  const auto v = rows(r.out / "verify.csv");
  CHECK(v.front()[0] == "comparison");
  CHECK(std::stod(v.front()[2]) == 0.0);
  for (const auto& row : v) CHECK(row.back() == "pass");

  cfg = g_range_cfg();
  cfg["controls"]["scenarios"] = {{{"type", "constant"}, {"a", 1.0}}};
  cfg["task"] = {{"suites", {"minimum"}}};
  r = run_with("verify", cfg, "verify_minimum");
  CHECK(r.code == kPropertyFailure);
  const auto m = rows(r.out / "verify.csv");
  CHECK(m.back()[1] == "\"gap\"");
  CHECK(std::abs(std::stod(m.back()[2]) - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 5e-3);
}

TEST_CASE("counterexample and byte-identical outputs") {
  json cfg{{"generator", {{"kind", "single_vol"}, {"a0", 1.0}}},
           {"task", {{"n_paths", 4000}, {"n_steps", 400}, {"t_stop", 0.9}, {"checkpoints", {0.25, 0.5}}}},
           {"seed", 99}};
  const auto a = run_with("counterexample", cfg, "ce_a");
  const auto b = run_with("counterexample", cfg, "ce_b");
  CHECK(a.code == kPass);
  const std::string text = slurp(a.out / "counterexample.csv");
  CHECK(text == slurp(b.out / "counterexample.csv"));
  CHECK(text.find("t,mean_R,stderr_R,target,(mean-target)/stderr\n") != std::string::npos);

  cfg["task"]["t_stop"] = 0.999;
  cfg["task"]["n_steps"] = 100;
  CHECK(run_with("counterexample", cfg, "ce_unstable").code == kStabilityError);
}

TEST_CASE("every output carries the run header") {
  json cfg = g_range_cfg();
  cfg["lattice"] = {{"n_steps", 10}, {"half_width", 6.0}, {"n_points", 61}};
  cfg["task"] = {{"solver", "2bsde"}};
  const auto a = run_with("solve", cfg, "hdr_a");
  const auto b = run_with("solve", cfg, "hdr_b");
  REQUIRE(a.code == kPass);
  for (const auto& entry : fs::directory_iterator(a.out)) {
    const std::string text = slurp(entry.path());
    CHECK(text.starts_with("# twobsde 0.1.0 config_hash="));
    CHECK(text.find(" task=") < text.find('\n'));
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text == slurp(b.out / entry.path().filename()));
  }
}

TEST_CASE("convergence study") {
  json cfg = g_range_cfg();
  cfg["task"] = {{"study", "bachelier_call"}, {"ladder", {{50, 241}, {100, 481}, {200, 961}, {400, 1921}}},
                 {"min_order_dt", 0.8}};
  const auto r = run_with("convergence", cfg, "conv_call");
  CHECK(r.code == kPass);
  const auto s = summary(r.out / "summary.csv");
  CHECK(s.at("monotone") == "true");
  CHECK(std::stod(s.at("order_dt")) >= 0.8);
  CHECK(rows(r.out / "convergence.csv").size() == 4);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hex64(255) == "00000000000000ff");
}

}
