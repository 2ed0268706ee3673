#include "twobsde/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "twobsde/bsde.hpp"
#include "twobsde/convergence.hpp"
#include "twobsde/errors.hpp"
#include "twobsde/montecarlo.hpp"
#include "twobsde/pde.hpp"
#include "twobsde/twobsde.hpp"
#include "twobsde/version.hpp"

namespace twobsde::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Every output file starts with one comment line identifying the run.
class OutputFile {
 public:
  OutputFile(const fs::path& path, const RunConfig& cfg, const std::string& tag)
      : path_(path), stream_(path, std::ios::binary | std::ios::trunc) {
    if (!stream_) throw ConfigError("cannot write " + path.string());
    stream_ << "# twobsde " << kVersion << " config_hash=" << hex64(cfg.config_hash)
            << " task=" << tag << '\n';
    stream_ << std::setprecision(17);
  }
  std::ostream& os() { return stream_; }

 private:
  fs::path path_;
  std::ofstream stream_;
};

class Summary {
 public:
  void add(const std::string& metric, double value) {
    std::ostringstream os;
    os << std::setprecision(17) << value;
    rows_.emplace_back(metric, os.str());
  }
  void add(const std::string& metric, const std::string& value) { rows_.emplace_back(metric, value); }

  void write(const fs::path& path, const RunConfig& cfg, const std::string& tag) const {
    OutputFile f(path, cfg, tag);
    f.os() << "metric,value\n";
    for (const auto& [m, v] : rows_) f.os() << m << ',' << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

const json& task_block(const RunConfig& cfg) { return cfg.task; }

double task_number(const RunConfig& cfg, const std::string& key, double fallback,
                   double lo = -INFINITY, double hi = INFINITY) {
  const json& t = task_block(cfg);
  if (!t.contains(key)) return fallback;
  if (!t.at(key).is_number()) throw ConfigError("task." + key + ": expected a number");
  const double v = t.at(key).get<double>();
  if (!std::isfinite(v) || v < lo || v > hi) throw ConfigError("task." + key + " out of range");
  return v;
}

std::string task_string(const RunConfig& cfg, const std::string& key, const std::string& fallback) {
  const json& t = task_block(cfg);
  if (!t.contains(key)) return fallback;
  if (!t.at(key).is_string()) throw ConfigError("task." + key + ": expected a string");
  return t.at(key).get<std::string>();
}

void check_task_keys(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : cfg.task.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("task: unknown key '" + key + "'");
  }
}

// Either an explicit array or {lo, hi, n, spacing}.
std::vector<double> parse_grid(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& e : j) {
      if (!e.is_number()) throw ConfigError(where + ": expected numbers");
      out.push_back(e.get<double>());
    }
    if (out.empty()) throw ConfigError(where + ": empty grid");
    return out;
  }
  if (!j.is_object()) throw ConfigError(where + ": expected an array or {lo, hi, n}");
  for (const auto& [key, _] : j.items())
    if (key != "lo" && key != "hi" && key != "n" && key != "spacing")
      throw ConfigError(where + ": unknown key '" + key + "'");
  if (!j.contains("lo") || !j.contains("hi") || !j.contains("n"))
    throw ConfigError(where + ": needs lo, hi and n");
  const double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
  const long n = j.at("n").get<long>();
  if (!(lo <= hi) || n < 1 || n > 10000000) throw ConfigError(where + ": invalid lo/hi/n");
  const std::string spacing = j.value("spacing", "linear");
  if (spacing == "log") {
    if (!(lo > 0.0)) throw ConfigError(where + ": log spacing needs lo > 0");
    return logspace(lo, hi, static_cast<std::size_t>(n));
  }
  if (spacing != "linear") throw ConfigError(where + ".spacing must be linear or log");
  return linspace(lo, hi, static_cast<std::size_t>(n));
}

std::string file_label(const std::string& label) {
  std::string out;
  for (char c : label) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  return out;
}

double x0_of(const RunConfig& cfg) { return task_number(cfg, "x0", cfg.lattice.center); }

// Variance rate chosen by a convex payoff under a reaction-free generator.
double convex_rate(const GeneratorSpec& spec) {
  if (spec.has_reaction()) throw ConfigError("this check needs a generator without reaction");
  if (const auto* s = std::get_if<SingleVol>(&spec.kind())) return s->a0;
  if (const auto* r = std::get_if<GRange>(&spec.kind())) return r->a_hi;
  throw ConfigError("this check needs single_vol or g_range");
}

}  // namespace

int cmd_conjugate(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  check_task_keys(cfg, {"a_grid", "gamma_grid", "method", "search_gamma", "at"});
  const GeneratorSpec spec = make_generator(cfg.generator);
  const auto a_grid = cfg.task.contains("a_grid")
                          ? parse_grid(cfg.task.at("a_grid"), "task.a_grid")
                          : linspace(0.1, 5.0, 50);
  const auto gamma_grid = cfg.task.contains("gamma_grid")
                              ? parse_grid(cfg.task.at("gamma_grid"), "task.gamma_grid")
                              : linspace(-3.0, 3.0, 61);
  for (double a : a_grid)
    if (!(a > 0.0)) throw ConfigError("task.a_grid: variance rates must be positive");

  double t = 0.0, x = 0.0, y = 0.0, z = 0.0;
  if (cfg.task.contains("at")) {
    const json& at = cfg.task.at("at");
    t = at.value("t", 0.0);
    x = at.value("x", 0.0);
    y = at.value("y", 0.0);
    z = at.value("z", 0.0);
  }

  const std::string method = task_string(cfg, "method", "closed");
  std::optional<ConjugateGenerator> conj;
  if (method == "closed") {
    conj = ConjugateGenerator::closed_form(spec);
  } else if (method == "numeric") {
    std::vector<double> search;
    if (cfg.task.contains("search_gamma")) {
      search = parse_grid(cfg.task.at("search_gamma"), "task.search_gamma");
    } else if (const auto* band = std::get_if<GammaBand>(&spec.kind())) {
      const auto n = static_cast<std::size_t>(std::lround((band->gamma_hi - band->gamma_lo) / 1e-3)) + 1;
      search = linspace(band->gamma_lo, band->gamma_hi, n);
    } else {
      search = linspace(-20.0, 20.0, 40001);
    }
    conj = ConjugateGenerator::numeric(spec, search, a_grid);
  } else {
    throw ConfigError("task.method must be closed or numeric");
  }

  fs::create_directories(out);
  {
    OutputFile f(out / "conjugate.csv", cfg, "generator-conjugate");
    f.os() << "a,F\n";
    std::size_t rows = 0;
    for (double a : a_grid) {
      const ExtReal F = (*conj)(t, x, y, z, a);
      if (F.is_unbounded()) continue;
      f.os() << a << ',' << F.value() << '\n';
      ++rows;
    }
    log << "conjugate.csv: " << rows << " finite rows of " << a_grid.size() << '\n';
  }
  {
    OutputFile f(out / "biconjugate.csv", cfg, "generator-biconjugate");
    f.os() << "gamma,hhat,unbounded_flag\n";
    const auto closed = method == "closed" ? std::optional(BiconjugateGenerator::closed_form(spec))
                                           : std::nullopt;
    for (double g : gamma_grid) {
      const ExtReal h = closed ? (*closed)(t, x, y, z, g) : biconjugate(*conj, t, x, y, z, g, a_grid);
      if (h.is_unbounded())
        f.os() << g << ",inf,1\n";
      else
        f.os() << g << ',' << h.value() << ",0\n";
    }
  }
  log << "domain of F: " << domain_DF(*conj).to_string() << '\n';
  return kPass;
}

int cmd_solve(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  check_task_keys(cfg, {"solver", "x0", "source", "error_window"});
  const std::string solver = task_string(cfg, "solver", "2bsde");
  const GeneratorSpec spec = make_generator(cfg.generator);
  const ConjugateGenerator conj = ConjugateGenerator::closed_form(spec);
  const TimeGrid tg = make_time_grid(cfg);
  const SpaceGrid sg = make_space_grid(cfg);
  const QuadratureRule quad = make_quadrature(cfg);
  const double x0 = x0_of(cfg);
  Payoff g = make_payoff(cfg.payoff);
  Summary summary;
  fs::create_directories(out);

  if (solver == "bsde") {
    auto scenarios = make_scenarios(cfg, std::nullopt);
    const ControlScenario control =
        scenarios.empty() ? ControlScenario::constant(cfg.control_grid.front()) : scenarios.front();
    const auto sol = solve_bsde(conj, control, g, tg, sg, quad);
    {
      OutputFile f(out / "solution.csv", cfg, "bsde-backward-euler");
      write_csv(f.os(), sol);
    }
    const double y0 = sol.y_series.front().interpolate(x0);
    const auto apriori = apriori_check(sol, true);
    summary.add("solver", "bsde");
    summary.add("scenario", control.label());
    summary.add("x0", x0);
    summary.add("Y0", y0);
    summary.add("apriori_ratio", apriori.ratio);
    summary.write(out / "summary.csv", cfg, "bsde-backward-euler");
    log << "Y0(" << x0 << ") = " << std::setprecision(10) << y0 << '\n';
    return kPass;
  }

  if (solver == "2bsde") {
    const ControlGrid cg = make_control_grid(cfg);
    const auto sol = solve_2bsde(conj, g, tg, sg, cg, quad);
    {
      OutputFile f(out / "solution.csv", cfg, "2bsde-dynamic-programming");
      write_csv(f.os(), sol);
    }
    auto scenarios = make_scenarios(cfg, sol.optimal_control);
    if (scenarios.empty()) scenarios.push_back(sol.optimal_control);
    for (const auto& s : scenarios) {
      const KPath kp = extract_K(sol, conj, s, quad);
      OutputFile f(out / ("k_" + file_label(s.label()) + ".csv"), cfg, "2bsde-increasing-process");
      write_csv(f.os(), kp);
    }
    const auto mc = minimum_condition_gap(sol, conj, scenarios, x0, quad);
    const double y0 = sol.y_series.front().interpolate(x0);
    summary.add("solver", "2bsde");
    summary.add("x0", x0);
    summary.add("Y0", y0);
    summary.add("minimum_condition_gap", mc.gap);
    summary.add("gap_attained_by", mc.labels[mc.attained_by]);
    summary.add("argmax_edge_fraction", sol.edge_fraction);
    summary.write(out / "summary.csv", cfg, "2bsde-dynamic-programming");
    log << "Y0(" << x0 << ") = " << std::setprecision(10) << y0
        << "  minimum_condition_gap = " << mc.gap << '\n';
    if (sol.edge_fraction > 0.0)
      log << "warning: maximiser sits on a truncated control-grid end at " << sol.edge_fraction * 100
          << "% of nodes\n";
    return kPass;
  }

  if (solver == "pde") {
    const std::string source = task_string(cfg, "source", "none");
    const ControlGrid cg = make_control_grid(cfg);
    const BiconjugateGenerator hhat = BiconjugateGenerator::closed_form(spec);
    PDEProblem prob{conj, hhat, g, {}};
    if (source == "manufactured") {
      prob.terminal = Payoff("manufactured", [](double x) { return manufactured_solution(1.0, x); });
      prob.source = manufactured_source(hhat);
    } else if (source != "none") {
      throw ConfigError("task.source must be none or manufactured");
    }
    const auto sol = solve_pde(prob, tg, sg, cg, quad);
    {
      OutputFile f(out / "solution.csv", cfg, "fully-nonlinear-pde");
      write_csv(f.os(), sol);
    }
    const double v0 = sol.values.front().interpolate(x0);
    summary.add("solver", "pde");
    summary.add("x0", x0);
    summary.add("V0", v0);
    if (source == "manufactured") {
      const double window = task_number(cfg, "error_window", 2.0, 0.0);
      auto max_error = [&](const PDESolution& s) {
        double e = 0.0;
        for (std::size_t j = 0; j < sg.size(); ++j)
          if (std::abs(sg.x(j) - sg.center()) <= window + 1e-12)
            e = std::max(e, std::abs(s.values.front()[j] - manufactured_solution(0.0, sg.x(j))));
        return e;
      };
      const double err = max_error(sol);
      summary.add("max_error", err);
      // Temporal order from the same space grid at n/4, n/2 and n steps.
      if (tg.n_steps() >= 4 && tg.n_steps() % 4 == 0) {
        std::vector<double> dts, errs;
        for (int n : {tg.n_steps() / 4, tg.n_steps() / 2}) {
          const TimeGrid coarse(n);
          dts.push_back(coarse.dt());
          errs.push_back(max_error(solve_pde(prob, coarse, sg, cg, quad)));
        }
        dts.push_back(tg.dt());
        errs.push_back(err);
        summary.add("order_dt", fitted_order(dts, errs));
      }
      log << "max_error = " << std::setprecision(6) << err << '\n';
    }
    summary.write(out / "summary.csv", cfg, "fully-nonlinear-pde");
    log << "V0(" << x0 << ") = " << std::setprecision(10) << v0 << '\n';
    return kPass;
  }

  throw ConfigError("task.solver must be bsde, 2bsde or pde");
}

namespace {

struct CheckRow {
  std::string suite;
  std::string check;
  double measured;
  double tolerance;
  bool pass;
};

std::vector<std::pair<json, json>> default_pairs() {
  return {
      {json{{"name", "constant"}, {"value", 0.0}}, json{{"name", "constant"}, {"value", 1.0}}},
      {json{{"name", "table"}, {"x", {-1.0, 0.0, 1.0}}, {"y", {-0.1, -0.1, 0.9}}},
       json{{"name", "call"}, {"strike", 0.0}}},
      {json{{"name", "neg_square"}}, json{{"name", "constant"}, {"value", 0.0}}},
      {json{{"name", "put"}, {"strike", 0.0}}, json{{"name", "abs"}}},
      {json{{"name", "callspread"}, {"k1", 0.0}, {"k2", 1.0}}, json{{"name", "call"}, {"strike", 0.0}}},
  };
}

double tolerance(const json& tols, const std::string& key, double fallback) {
  if (!tols.contains(key)) return fallback;
  if (!tols.at(key).is_number()) throw ConfigError("task.tolerances." + key + ": expected a number");
  return tols.at(key).get<double>();
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  check_task_keys(cfg, {"suites", "tolerances", "x0", "pairs"});
  std::vector<std::string> suites;
  if (cfg.task.contains("suites")) {
    for (const auto& s : cfg.task.at("suites")) {
      if (!s.is_string()) throw ConfigError("task.suites: expected strings");
      suites.push_back(s.get<std::string>());
    }
  } else {
    suites = {"comparison", "minimum", "representation", "duality", "apriori"};
  }
  const json tols = cfg.task.value("tolerances", json::object());

  const GeneratorSpec spec = make_generator(cfg.generator);
  const ConjugateGenerator conj = ConjugateGenerator::closed_form(spec);
  const TimeGrid tg = make_time_grid(cfg);
  const SpaceGrid sg = make_space_grid(cfg);
  const QuadratureRule quad = make_quadrature(cfg);
  const ControlGrid cg = make_control_grid(cfg);
  const double x0 = x0_of(cfg);
  const Payoff g = make_payoff(cfg.payoff);

  std::vector<CheckRow> rows;
  std::optional<TwoBSDESolution> base;
  auto base_solution = [&]() -> const TwoBSDESolution& {
    if (!base) base = solve_2bsde(conj, g, tg, sg, cg, quad);
    return *base;
  };

  for (const auto& suite : suites) {
    if (suite == "comparison") {
      const double tol = tolerance(tols, "comparison", 1e-12);
      std::vector<std::pair<json, json>> pairs = default_pairs();
      if (cfg.task.contains("pairs")) {
        pairs.clear();
        for (const auto& p : cfg.task.at("pairs")) {
          if (!p.is_array() || p.size() != 2) throw ConfigError("task.pairs: expected [lower, upper] pairs");
          pairs.emplace_back(p[0], p[1]);
        }
      }
      for (const auto& [lo, hi] : pairs) {
        const Payoff g1 = make_payoff(lo), g2 = make_payoff(hi);
        const auto r = comparison_check(solve_2bsde(conj, g1, tg, sg, cg, quad),
                                        solve_2bsde(conj, g2, tg, sg, cg, quad), tol);
        rows.push_back({suite, g1.name() + "<=" + g2.name(), r.max_violation, tol,
                        r.terminal_dominates && r.max_violation <= tol});
      }
    } else if (suite == "minimum") {
      const double tol = tolerance(tols, "minimum", 1e-8);
      const auto& sol = base_solution();
      auto scenarios = make_scenarios(cfg, sol.optimal_control);
      if (scenarios.empty()) scenarios.push_back(sol.optimal_control);
      const auto r = minimum_condition_gap(sol, conj, scenarios, x0, quad);
      for (std::size_t i = 0; i < r.labels.size(); ++i)
        rows.push_back({suite, "E[K_1] under " + r.labels[i], r.expected_K[i], tol, true});
      rows.push_back({suite, "gap", r.gap, tol, r.gap <= tol});
    } else if (suite == "representation") {
      const double tol = tolerance(tols, "representation", 1e-10);
      const auto r = representation_lower_bound(conj, g, tg, sg, cg, quad, x0, tol);
      rows.push_back({suite, "max (Y^a - Y)+", r.max_violation, tol, r.max_violation <= tol});
      rows.push_back({suite, "argmax mismatch", r.argmax_mismatch, tol, r.argmax_mismatch <= tol});
    } else if (suite == "duality") {
      const double tol = tolerance(tols, "duality", 1e-6);
      const auto& sol = base_solution();
      PDEProblem prob{conj, BiconjugateGenerator::closed_form(spec), g, {}};
      const auto pde = solve_pde(prob, tg, sg, cg, quad);
      double diff = 0.0;
      for (int k = 0; k <= tg.n_steps(); ++k)
        for (std::size_t j = 0; j < sg.size(); ++j)
          diff = std::max(diff, std::abs(pde.values[k][j] - sol.y_series[k][j]));
      rows.push_back({suite, "max |v - Y|", diff, tol, diff <= tol});
    } else if (suite == "apriori") {
      auto scenarios = make_scenarios(cfg, std::nullopt);
      if (scenarios.empty())
        for (double a : cg.values()) scenarios.push_back(ControlScenario::constant(a));
      for (const auto& s : scenarios) {
        const auto r = apriori_check(solve_bsde(conj, s, g, tg, sg, quad), false);
        const std::string what = r.asserted ? "max|Y| / bound under " : "max|Y| / bound (reported) under ";
        rows.push_back({suite, what + s.label(), r.ratio, 1.0, r.passed});
      }
    } else if (suite == "feynman-kac") {
      const double res_tol = tolerance(tols, "feynman_kac_residual", 1e-10);
      const double k_tol = tolerance(tols, "feynman_kac_k", 1e-12);
      const double a = convex_rate(spec);
      auto v = [a](double t, double x) { return x * x + a * (1.0 - t); };
      std::vector<ControlScenario> probes;
      for (double b : cg.values()) probes.push_back(ControlScenario::constant(b));
      const auto r = feynman_kac_verify(v, tg, sg, conj, BiconjugateGenerator::closed_form(spec),
                                        ControlScenario::constant(a), probes, quad, x0);
      rows.push_back({suite, "residual x^2+a(1-t)", r.residual_max, res_tol, r.residual_max <= res_tol});
      rows.push_back({suite, "-min k", -r.k_min, k_tol, r.k_min >= -k_tol});
    } else {
      throw ConfigError("unknown suite '" + suite +
                        "' (comparison, minimum, feynman-kac, apriori, representation, duality)");
    }
  }

  fs::create_directories(out);
  bool all = true;
  {
    OutputFile f(out / "verify.csv", cfg, "property-suites");
    f.os() << "suite,check,measured,tolerance,status\n";
    for (const auto& r : rows) {
      f.os() << r.suite << ",\"" << r.check << "\"," << r.measured << ',' << r.tolerance << ','
             << (r.pass ? "pass" : "fail") << '\n';
      log << (r.pass ? "PASS " : "FAIL ") << r.suite << ": " << r.check << " = " << r.measured
          << " (tol " << r.tolerance << ")\n";
      all = all && r.pass;
    }
  }
  return all ? kPass : kPropertyFailure;
}

int cmd_counterexample(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  check_task_keys(cfg, {"c", "n_paths", "n_steps", "t_stop", "n_batches", "checkpoints"});
  CounterexampleConfig cc;
  cc.c = task_number(cfg, "c", cc.c, -1e6, 1e6);
  cc.n_paths = static_cast<long>(task_number(cfg, "n_paths", static_cast<double>(cc.n_paths), 2, 1e9));
  cc.n_steps = static_cast<int>(task_number(cfg, "n_steps", cc.n_steps, 1, 1e8));
  cc.t_stop = task_number(cfg, "t_stop", cc.t_stop, 0.0, 1.0);
  cc.n_batches = static_cast<int>(task_number(cfg, "n_batches", cc.n_batches, 1, 1e6));
  cc.seed = cfg.seed;
  std::vector<double> checkpoints{0.25, 0.5, 0.75};
  if (cfg.task.contains("checkpoints")) checkpoints = parse_grid(cfg.task.at("checkpoints"), "task.checkpoints");

  const auto report = simulate_counterexample(cc, checkpoints, default_thread_count());
  fs::create_directories(out);
  {
    OutputFile f(out / "counterexample.csv", cfg, "nonuniqueness-counterexample");
    f.os() << "# config " << cfg.canonical << '\n';
    write_csv(f.os(), report);
  }
  Summary summary;
  summary.add("dt", report.dt);
  summary.add("bias_budget", report.bias_budget);
  summary.add("decay_exponent", report.decay_exponent);
  summary.add("decay_prefactor", report.decay_prefactor);
  summary.add("dynamics_residual", report.dynamics_residual);
  summary.add("all_within_tolerance", report.all_within_tolerance ? "true" : "false");
  summary.write(out / "summary.csv", cfg, "nonuniqueness-counterexample");
  for (const auto& c : report.checkpoints)
    log << "t=" << c.t_grid << " mean R=" << c.mean_R << " target=" << c.target
        << " z=" << c.z_score << (c.within_tolerance ? " ok" : " OUT") << '\n';
  log << "decay exponent " << report.decay_exponent << '\n';
  return report.all_within_tolerance ? kPass : kPropertyFailure;
}

int cmd_convergence(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  check_task_keys(cfg, {"study", "reference", "ladder", "x0", "strike", "error_window",
                        "min_order_dt", "min_order_dx"});
  ConvergenceSetup setup;
  setup.study = task_string(cfg, "study", "bachelier_call");
  setup.reference = task_string(cfg, "reference", "closed_form");
  setup.generator = make_generator(cfg.generator);
  setup.strike = task_number(cfg, "strike", 0.0);
  setup.center = cfg.lattice.center;
  setup.half_width = cfg.lattice.half_width;
  setup.quadrature_nodes = cfg.lattice.quadrature_nodes;
  setup.controls = cfg.control_grid;
  setup.x0 = x0_of(cfg);
  setup.window = task_number(cfg, "error_window", 2.0, 0.0);
  if (!cfg.task.contains("ladder") || !cfg.task.at("ladder").is_array())
    throw ConfigError("task.ladder: expected an array of [n_steps, n_points] pairs");
  for (const auto& l : cfg.task.at("ladder")) {
    if (!l.is_array() || l.size() != 2 || !l[0].is_number_integer() || !l[1].is_number_integer())
      throw ConfigError("task.ladder: expected [n_steps, n_points] integer pairs");
    setup.ladder.push_back({l[0].get<int>(), l[1].get<int>()});
  }
  const auto result = run_convergence(setup);

  fs::create_directories(out);
  {
    OutputFile f(out / "convergence.csv", cfg, "grid-refinement");
    f.os() << "n_steps,n_points,dt,dx,value,error,reference\n";
    for (const auto& r : result.rows)
      f.os() << r.level.n_steps << ',' << r.level.n_points << ',' << r.dt << ',' << r.dx << ','
             << r.value << ',' << r.error << ',' << (r.is_reference ? 1 : 0) << '\n';
  }
  Summary summary;
  summary.add("study", result.study);
  summary.add("reference", result.reference);
  summary.add("order_dt", result.order_dt);
  summary.add("order_dx", result.order_dx);
  summary.add("monotone", result.monotone ? "true" : "false");
  summary.write(out / "summary.csv", cfg, "grid-refinement");
  log << "fitted order: dt " << result.order_dt << ", dx " << result.order_dx
      << (result.monotone ? ", monotone" : ", not monotone") << '\n';

  bool ok = true;
  if (cfg.task.contains("min_order_dt")) ok = ok && result.order_dt >= task_number(cfg, "min_order_dt", 0.0);
  if (cfg.task.contains("min_order_dx")) ok = ok && result.order_dx >= task_number(cfg, "min_order_dx", 0.0);
  return ok ? kPass : kPropertyFailure;
}

int run(const std::string& command, const fs::path& config, const fs::path& out, std::ostream& log,
        std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config);
    const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : out;
    if (command == "conjugate") return cmd_conjugate(cfg, dir, log);
    if (command == "solve") return cmd_solve(cfg, dir, log);
    if (command == "verify") return cmd_verify(cfg, dir, log);
    if (command == "counterexample") return cmd_counterexample(cfg, dir, log);
    if (command == "convergence") return cmd_convergence(cfg, dir, log);
    err << "unknown command '" << command << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const StabilityError& e) {
    err << "stability error: " << e.what() << " (admissible dt <= " << e.admissible_dt() << ")\n";
    return kStabilityError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace twobsde::cli
