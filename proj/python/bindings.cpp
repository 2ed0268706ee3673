#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "twobsde/errors.hpp"
#include "twobsde/montecarlo.hpp"
#include "twobsde/pde.hpp"
#include "twobsde/twobsde.hpp"
#include "twobsde/version.hpp"

namespace py = pybind11;
using namespace twobsde;

namespace {

// None for unbounded values, a float otherwise.
py::object ext(const ExtReal& v) {
  if (v.is_unbounded()) return py::none();
  return py::float_(v.value());
}

std::vector<std::vector<double>> series(const std::vector<ValueSurface>& s) {
  std::vector<std::vector<double>> out;
  out.reserve(s.size());
  for (const auto& v : s) out.emplace_back(v.values().begin(), v.values().end());
  return out;
}

}  // namespace

PYBIND11_MODULE(_twobsde, m) {
  m.doc() = "Lattice solvers for second order BSDEs";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StabilityError>(m, "StabilityError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<GeneratorSpec>(m, "GeneratorSpec")
      .def_static("single_vol", [](double a0) { return GeneratorSpec::single_vol(a0); }, py::arg("a0"))
      .def_static("g_range", [](double lo, double hi) { return GeneratorSpec::g_range(lo, hi); }, py::arg("a_lo"),
                  py::arg("a_hi"))
      .def_static("gamma_band", [](double lo, double hi) { return GeneratorSpec::gamma_band(lo, hi); },
                  py::arg("gamma_lo"), py::arg("gamma_hi"))
      .def_property_readonly("name", &GeneratorSpec::name)
      .def("H", [](const GeneratorSpec& s, double gamma) { return ext(eval_H(s, 0, 0, 0, 0, gamma)); },
           py::arg("gamma"))
      .def("F", [](const GeneratorSpec& s, double a) { return ext(conjugate_closed(s, 0, 0, 0, 0, a)); }, py::arg("a"))
      .def("hhat",
           [](const GeneratorSpec& s, double gamma) {
             return ext(BiconjugateGenerator::closed_form(s)(0, 0, 0, 0, gamma));
           },
           py::arg("gamma"))
      .def("__repr__", [](const GeneratorSpec& s) { return "<GeneratorSpec " + s.name() + ">"; });

  py::class_<Payoff>(m, "Payoff")
      .def(py::init<std::string, std::function<double(double)>>(), py::arg("name"), py::arg("fn"))
      .def_static("call", &Payoff::call, py::arg("strike"))
      .def_static("put", &Payoff::put, py::arg("strike"))
      .def_static("callspread", &Payoff::callspread, py::arg("k1"), py::arg("k2"))
      .def_static("abs", &Payoff::abs)
      .def_static("square", &Payoff::square)
      .def_static("neg_square", &Payoff::neg_square)
      .def_static("linear", &Payoff::linear, py::arg("beta"))
      .def_static("butterfly", &Payoff::butterfly, py::arg("strike"), py::arg("wing"))
      .def_static("constant", &Payoff::constant, py::arg("value"))
      .def_static("table", &Payoff::table, py::arg("xs"), py::arg("ys"))
      .def("__call__", &Payoff::operator(), py::arg("x"))
      .def_property_readonly("name", &Payoff::name);

  py::class_<SpaceGrid>(m, "SpaceGrid")
      .def(py::init<double, double, int>(), py::arg("center"), py::arg("half_width"), py::arg("n_points"))
      .def_property_readonly("dx", &SpaceGrid::dx)
      .def("nodes", &SpaceGrid::nodes);

  m.def(
      "conjugate_numeric",
      [](const GeneratorSpec& s, double a, const std::vector<double>& gamma_grid) {
        return ext(conjugate_numeric(s, 0, 0, 0, 0, a, gamma_grid));
      },
      py::arg("generator"), py::arg("a"), py::arg("gamma_grid"));

  m.def(
      "solve_bsde",
      [](const GeneratorSpec& s, double a, const Payoff& g, int n_steps, const SpaceGrid& sg, int nodes) {
        const auto sol = solve_bsde(ConjugateGenerator::closed_form(s), ControlScenario::constant(a), g,
                                    TimeGrid(n_steps), sg, QuadratureRule::gauss_hermite(nodes));
        py::dict d;
        d["y"] = series(sol.y_series);
        d["z"] = series(sol.z_series);
        return d;
      },
      py::arg("generator"), py::arg("a"), py::arg("payoff"), py::arg("n_steps"), py::arg("grid"),
      py::arg("quadrature_nodes") = 16, "Backward Euler BSDE under a constant variance rate.");

  m.def(
      "solve_2bsde",
      [](const GeneratorSpec& s, const Payoff& g, int n_steps, const SpaceGrid& sg, const std::vector<double>& controls,
         int nodes) {
        const auto sol = solve_2bsde(ConjugateGenerator::closed_form(s), g, TimeGrid(n_steps), sg,
                                     ControlGrid(controls), QuadratureRule::gauss_hermite(nodes));
        std::vector<std::vector<double>> a_star;
        for (int k = 0; k < n_steps; ++k) {
          std::vector<double> row(sg.size());
          for (std::size_t j = 0; j < sg.size(); ++j) row[j] = sol.optimal_control.at(k, 0.0, j);
          a_star.push_back(std::move(row));
        }
        py::dict d;
        d["y"] = series(sol.y_series);
        d["z"] = series(sol.z_series);
        d["gamma"] = series(sol.gamma_series);
        d["a_star"] = a_star;
        d["edge_fraction"] = sol.edge_fraction;
        return d;
      },
      py::arg("generator"), py::arg("payoff"), py::arg("n_steps"), py::arg("grid"), py::arg("controls"),
      py::arg("quadrature_nodes") = 16, "Dynamic-programming 2BSDE solver.");

  m.def(
      "solve_pde",
      [](const GeneratorSpec& s, const Payoff& g, int n_steps, const SpaceGrid& sg, const std::vector<double>& controls,
         int nodes) {
        PDEProblem prob{ConjugateGenerator::closed_form(s), BiconjugateGenerator::closed_form(s), g, {}};
        return series(
            solve_pde(prob, TimeGrid(n_steps), sg, ControlGrid(controls), QuadratureRule::gauss_hermite(nodes)).values);
      },
      py::arg("generator"), py::arg("payoff"), py::arg("n_steps"), py::arg("grid"), py::arg("controls"),
      py::arg("quadrature_nodes") = 16);

  m.def(
      "mc_terminal_value",
      [](const Payoff& g, double a, long n_paths, std::uint64_t seed, double x0) {
        const auto r = mc_terminal_value(g, a, n_paths, seed, x0);
        return py::make_tuple(r.mean, r.std_error);
      },
      py::arg("payoff"), py::arg("a"), py::arg("n_paths"), py::arg("seed"), py::arg("x0") = 0.0,
      "Antithetic Monte Carlo estimate of E[g(x0 + sqrt(a) W_1)] as (mean, stderr).");

  m.def(
      "simulate_counterexample",
      [](double c, long n_paths, int n_steps, double t_stop, std::uint64_t seed, const std::vector<double>& checkpoints,
         int n_threads) {
        CounterexampleConfig cfg;
        cfg.c = c;
        cfg.n_paths = n_paths;
        cfg.n_steps = n_steps;
        cfg.t_stop = t_stop;
        cfg.seed = seed;
        const auto r = simulate_counterexample(cfg, checkpoints, n_threads);
        py::list rows;
        for (const auto& s : r.checkpoints)
          rows.append(py::dict(py::arg("t") = s.t_grid, py::arg("mean_R") = s.mean_R, py::arg("stderr_R") = s.stderr_R,
                               py::arg("target") = s.target, py::arg("within_tolerance") = s.within_tolerance));
        std::ostringstream csv;
        write_csv(csv, r);
        py::dict d;
        d["checkpoints"] = rows;
        d["decay_exponent"] = r.decay_exponent;
        d["dynamics_residual"] = r.dynamics_residual;
        d["csv"] = csv.str();
        return d;
      },
      py::arg("c") = 2.0, py::arg("n_paths") = 100000, py::arg("n_steps") = 4000, py::arg("t_stop") = 0.99,
      py::arg("seed") = 20240601, py::arg("checkpoints") = std::vector<double>{0.25, 0.5, 0.75},
      py::arg("n_threads") = 0);
}
