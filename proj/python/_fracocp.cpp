#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracocp/app.hpp"
#include "fracocp/calculus.hpp"
#include "fracocp/config.hpp"
#include "fracocp/errors.hpp"
#include "fracocp/expr.hpp"
#include "fracocp/pde.hpp"
#include "fracocp/spectral.hpp"

namespace py = pybind11;
using namespace fracocp;

namespace {

Field field_on(const GridPtr& grid, const Eigen::VectorXd& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != grid->size()) {
    throw py::value_error(std::string(what) + ": expected " + std::to_string(grid->size()) + " values, got " +
                          std::to_string(v.size()));
  }
  return Field(grid, v);
}

py::dict fields(const ReducedEval& at) {
  py::dict d;
  d["u"] = at.u.values();
  d["y"] = at.y.values();
  d["q"] = at.q.values();
  d["d"] = at.grad.values();
  return d;
}

}  // namespace

PYBIND11_MODULE(_fracocp, m) {
  m.doc() = "Spectral fractional optimal control: solver, derivatives and optimality certificates";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const SolverError& e) {
      py::set_error(solver_error, e.what());
    } catch (const GridMismatch& e) {
      py::set_error(PyExc_ValueError, e.what());
    } catch (const ParseError& e) {
      py::set_error(PyExc_ValueError, e.what());
    } catch (const AssumptionViolation& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("dim", &RunConfig::dim)
      .def_readonly("n", &RunConfig::n)
      .def_readonly("s", &RunConfig::s)
      .def_readonly("alpha", &RunConfig::alpha)
      .def_readonly("beta", &RunConfig::beta)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readonly("n_list", &RunConfig::n_list)
      .def("with_n", &RunConfig::with_n, py::arg("n"))
      .def("nodes", [](const RunConfig& cfg) {
        const GridPtr g = build_scenario(cfg).grid;
        Eigen::MatrixXd x(static_cast<Eigen::Index>(g->size()), g->dim());
        for (std::size_t i = 0; i < g->size(); ++i) {
          for (int a = 0; a < g->dim(); ++a) x(static_cast<Eigen::Index>(i), a) = g->coord(i, a);
        }
        return x;
      });

  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));
  m.def(
      "parse_config",
      [](const std::string& text, const std::string& base_dir) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
          throw ConfigError("", std::string("malformed JSON: ") + e.what());
        }
        return parse_config(j, base_dir);
      },
      py::arg("text"), py::arg("base_dir") = ".");

  m.def(
      "eigenvalues",
      [](int n, double lo, double hi) { return build_eigenbasis(build_grid_1d({lo, hi}, n)).lambda(); },
      py::arg("n"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, "1D Dirichlet FD Laplacian eigenvalues, ascending");

  m.def(
      "eval_expr",
      [](const std::string& text, int n, double lo, double hi) {
        const GridPtr g = build_grid_1d({lo, hi}, n);
        return eval_on_grid(parse_expr(text, 1), g).values();
      },
      py::arg("text"), py::arg("n"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);

  m.def(
      "state_solve",
      [](const RunConfig& cfg, const Eigen::VectorXd& u) {
        const Scenario sc = build_scenario(cfg);
        return state_solve(sc.problem, field_on(sc.grid, u, "u"), cfg.solve).y.values();
      },
      py::arg("config"), py::arg("u"));

  m.def(
      "gradient",
      [](const RunConfig& cfg, const Eigen::VectorXd& u) {
        const Scenario sc = build_scenario(cfg);
        const ReducedEval at = gradient(sc.problem, field_on(sc.grid, u, "u"), cfg.solve);
        return py::make_tuple(at.J, fields(at));
      },
      py::arg("config"), py::arg("u"), "Returns (J, {u, y, q, d}).");

  m.def(
      "solve",
      [](const RunConfig& cfg) {
        const SolveArtifacts a = run_solve(cfg);
        return py::make_tuple(solve_json(cfg, a).dump(), fields(a.result.at));
      },
      py::arg("config"), "Returns (report JSON text, {u, y, q, d}).");

  m.def(
      "certify",
      [](const RunConfig& cfg, const Eigen::VectorXd& u, std::optional<Eigen::VectorXd> y,
         std::optional<Eigen::VectorXd> q) {
        const GridPtr g = build_scenario(cfg).grid;
        std::optional<Field> fy, fq;
        if (y) fy = field_on(g, *y, "y");
        if (q) fq = field_on(g, *q, "q");
        return certify_json(cfg, run_certify(cfg, field_on(g, u, "u"), fy, fq)).dump();
      },
      py::arg("config"), py::arg("u"), py::arg("y") = py::none(), py::arg("q") = py::none());

  m.def(
      "converge",
      [](const RunConfig& cfg, const std::vector<int>& n_list) {
        return convergence_json(cfg, run_convergence(cfg, n_list.empty() ? cfg.n_list : n_list)).dump();
      },
      py::arg("config"), py::arg("n_list") = std::vector<int>{});

  m.def(
      "validate_family", [](const RunConfig& cfg) { return family_json(cfg, run_validate_family(cfg)).dump(); },
      py::arg("config"));
}
