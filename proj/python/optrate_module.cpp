#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "optrate/estimators.hpp"
#include "optrate/experiments.hpp"
#include "optrate/widths.hpp"

namespace py = pybind11;
using namespace optrate;

namespace {

py::dict to_dict(const ScenarioResult& r) {
  py::list rows;
  for (const ResultRow& row : r.table.rows()) {
    rows.append(py::make_tuple(row.trial, row.x_key, row.x_value, row.quantity, row.value));
  }
  py::list checks;
  for (const Check& c : r.checks) {
    py::dict d;
    d["name"] = c.name;
    d["nominal"] = c.nominal;
    d["observed"] = c.observed;
    d["pass"] = c.pass;
    d["trials"] = c.trials;
    checks.append(d);
  }
  py::dict out;
  out["scenario"] = r.scenario;
  out["rows"] = rows;
  out["checks"] = checks;
  out["metadata"] = r.table.metadata();
  out["all_pass"] = r.all_pass();
  out["runtime_seconds"] = r.runtime_seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_optrate, m) {
  m.doc() = "Optimistic-rate simulation core";
  m.attr("__version__") = OPTRATE_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("scenario_names", &scenario_names);
  m.def(
      "run_scenario",
      [](const std::string& scenario, const std::vector<std::string>& overrides) {
        ResolvedConfig cfg = default_config(scenario, overrides);
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(cfg);
        }
        return to_dict(r);
      },
      py::arg("scenario"), py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "scenario_csv",
      [](const std::string& scenario, const std::vector<std::string>& overrides) {
        ResolvedConfig cfg = default_config(scenario, overrides);
        py::gil_scoped_release release;
        return run_scenario(cfg).table.to_csv(false);
      },
      py::arg("scenario"), py::arg("overrides") = std::vector<std::string>{});

  m.def("project_l1_ball", &project_l1_ball, py::arg("v"), py::arg("radius"));
  m.def(
      "least_squares_minnorm",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) { return least_squares_minnorm(X, Y).w; },
      py::arg("X"), py::arg("Y"));
  m.def("statistical_dimension_psi", &statistical_dimension_psi, py::arg("rho"));
  m.def("chi_mean", &chi_mean, py::arg("k"));
}
