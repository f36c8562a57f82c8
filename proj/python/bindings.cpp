#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualion/config.hpp"
#include "dualion/detection.hpp"
#include "dualion/fit.hpp"
#include "dualion/motion.hpp"
#include "dualion/runner.hpp"

namespace py = pybind11;
using namespace dualion;

namespace {

std::vector<FitPoint> points(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& sigma) {
  if (x.size() != y.size() || x.size() != sigma.size()) {
    throw std::invalid_argument("x, y and sigma must have equal length");
  }
  std::vector<FitPoint> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back({x[i], y[i], sigma[i]});
  return out;
}

std::vector<std::pair<double, double>> modes_list(const ModeSet& set) {
  std::vector<std::pair<double, double>> out;
  for (const auto& m : set.modes) out.emplace_back(m.omega, m.eta);
  return out;
}

ModeSet modes_from(const std::vector<std::pair<double, double>>& list) {
  ModeSet set;
  for (const auto& [omega, eta] : list) set.modes.push_back({omega, eta});
  set.validate();
  return set;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dualion core bindings";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("model", &FitResult::model)
      .def_readonly("names", &FitResult::names)
      .def_readonly("params", &FitResult::params)
      .def_readonly("stderrs", &FitResult::stderrs)
      .def_readonly("residual_rss", &FitResult::residual_rss)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("derived", &FitResult::derived)
      .def("param", &FitResult::param)
      .def("param_stderr", &FitResult::param_stderr);

  m.def("experiments", [] {
    std::vector<std::string> out;
    for (auto kind : kAllExperiments) out.push_back(to_string(kind));
    return out;
  });

  m.def("two_ion_transverse_modes",
        [](double fx, double fy, double fz, double eta) {
          return modes_list(two_ion_transverse_modes(fx, fy, fz, eta));
        },
        py::arg("freq_x_hz") = 3.15e6, py::arg("freq_y_hz") = 2.97e6,
        py::arg("freq_z_hz") = 0.12e6, py::arg("eta") = 0.024,
        "List of (omega rad/s, eta) for the four transverse modes.");

  m.def("mean_occupation", &mean_occupation, py::arg("omega"), py::arg("temperature"));

  m.def("thermal_carrier_signal",
        [](double t, double omega0, double temperature,
           const std::vector<std::pair<double, double>>& modes) {
          return thermal_carrier_signal(t, omega0, ThermalState::at_temperature(temperature),
                                        modes_from(modes));
        },
        py::arg("t"), py::arg("omega0"), py::arg("temperature"), py::arg("modes"));

  m.def("fit_power_decay",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& s) { return fit_power_decay(points(x, y, s)); },
        py::arg("n"), py::arg("y"), py::arg("sigma"));
  m.def("fit_exp_decay",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& s) { return fit_exp_decay(points(x, y, s)); },
        py::arg("t"), py::arg("y"), py::arg("sigma"));
  m.def("fit_rb",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& s) { return fit_rb(points(x, y, s)); },
        py::arg("m"), py::arg("y"), py::arg("sigma"));
  m.def("fit_thermal_rabi",
        [](const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& s, const std::vector<std::pair<double, double>>& modes) {
          return fit_thermal_rabi(points(x, y, s), modes_from(modes));
        },
        py::arg("t"), py::arg("y"), py::arg("sigma"), py::arg("modes"));

  m.def("average_fidelity_mub", &average_fidelity_mub, py::arg("per_state"));

  m.def("detection_fidelities", [] {
    return std::map<std::string, double>{
        {"direct_s", detection_fidelity(direct_s_detection())},
        {"shelve_f_short", shelve_f_fidelity(kDefaultPumpSuccess, shelved_detection_short())},
        {"shelve_f_extended", shelve_f_fidelity(kDefaultPumpSuccess, shelved_detection_extended())},
        {"shelve_s", shelve_s_fidelity(kDefaultTransferChain, shelved_detection_extended())},
    };
  });

  m.def("reference_config", &reference_config);
  m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); },
        py::arg("config_text"));

  m.def("run",
        [](const std::string& text, const std::string& output_dir) {
          RunConfig config = parse_config(text);
          set_value(config, "run", "output_dir", output_dir);
          const RunReport report = run_experiment(config);
          return py::make_tuple(report.converged, report.files);
        },
        py::arg("config_text"), py::arg("output_dir"),
        "Runs the configured experiment; returns (converged, files written).");
}
