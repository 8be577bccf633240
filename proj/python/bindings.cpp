#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rantsim/agent.hpp"
#include "rantsim/continuum.hpp"
#include "rantsim/harness.hpp"
#include "rantsim/photormone.hpp"
#include "rantsim/trap.hpp"

namespace py = pybind11;
using namespace rantsim;

namespace {

py::array_t<double> as_grid(const std::vector<double>& v, std::size_t nx, std::size_t ny) {
  py::array_t<double> out({ny, nx});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ConfigMap to_config(const std::map<std::string, py::object>& items) {
  ConfigMap cfg;
  for (const auto& [k, v] : items) {
    if (py::isinstance<py::bool_>(v)) {
      cfg[k] = v.cast<bool>() ? "true" : "false";
    } else if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ", ") + py::str(e).cast<std::string>();
      cfg[k] = s;
    } else {
      cfg[k] = py::str(v).cast<std::string>();
    }
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_rantsim, m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<TrapRegime>(m, "TrapRegime")
      .def(py::init([](double L_w, double L_minus, double k_hat) {
             TrapRegime r{L_w, L_minus, k_hat};
             r.validate();
             return r;
           }),
           py::arg("L_w"), py::arg("L_minus"), py::arg("k_hat") = 1.0)
      .def_static("from_dimensional", &TrapRegime::from_dimensional, py::arg("w"), py::arg("l_s"),
                  py::arg("v_o"), py::arg("k_plus"), py::arg("k_minus"))
      .def_readwrite("L_w", &TrapRegime::L_w)
      .def_readwrite("L_minus", &TrapRegime::L_minus)
      .def_readwrite("k_hat", &TrapRegime::k_hat)
      .def("__repr__", [](const TrapRegime& r) {
        return "TrapRegime(L_w=" + std::to_string(r.L_w) + ", L_minus=" + std::to_string(r.L_minus) +
               ", k_hat=" + std::to_string(r.k_hat) + ")";
      });

  m.def("classify", [](const TrapRegime& r) { return std::string(to_string(classify(r))); });
  m.def(
      "critical_gain",
      [](const TrapRegime& r) {
        const auto p = critical_gain(r);
        py::dict d;
        d["G_c"] = p.G_c;
        d["r_star"] = p.r_star;
        d["regime"] = to_string(p.regime);
        d["formula"] = p.formula;
        return d;
      },
      "Nondimensional critical gain; raises ConfigError when untrappable.");
  m.def("trapping_radius_geometric", &trapping_radius_geometric);
  m.def("implicit_radius_large_decay", &implicit_radius_large_decay, py::arg("regime"),
        py::arg("G_nd"), py::arg("r_min") = 0.5);

  m.def("nondim_flow", [](double psi, double r, double G) {
    const auto f = nondim_flow(psi, r, G);
    return py::make_tuple(f.dpsi, f.dr);
  });
  m.def(
      "integrate_phase",
      [](double psi0, double r0, double G, double dt, double t_end, int stride) {
        const auto path = integrate_phase(psi0, r0, G, dt, t_end, stride);
        py::array_t<double> out({path.size(), std::size_t{3}});
        auto a = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < path.size(); ++i) {
          a(i, 0) = path[i].t;
          a(i, 1) = path[i].psi;
          a(i, 2) = path[i].r;
        }
        return out;
      },
      py::arg("psi0"), py::arg("r0"), py::arg("G"), py::arg("dt"), py::arg("t_end"),
      py::arg("stride") = 1, "Rows of (t, psi, r).");
  m.def("lindstedt_frequency", &lindstedt_frequency);

  m.def("greens_oracle",
        [](double x, double y, double t, double alpha, double D_c, double k_hat) {
          return greens_oracle({x, y}, t, alpha, D_c, k_hat);
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("alpha") = 1.0, py::arg("D_c") = 1.0,
        py::arg("k_hat") = 1.0);

  m.def(
      "continuum_preset",
      [](const std::string& name, double h, double t_end) {
        ContinuumPreset pre = load_preset(name, h);
        const long steps = advance_continuum(pre.fields, pre.params, t_end);
        const auto& f = pre.fields;
        py::dict d;
        d["t"] = f.t;
        d["steps"] = steps;
        d["h"] = f.h;
        d["K"] = pre.params.K;
        d["C"] = pre.params.C;
        d["rho_a"] = as_grid(f.rho_a, f.nx, f.ny);
        d["c"] = as_grid(f.c, f.nx, f.ny);
        d["rho_s"] = as_grid(f.rho_s, f.nx, f.ny);
        return d;
      },
      py::arg("name"), py::arg("h") = 0.1, py::arg("t_end") = 0.0,
      "Loads a preset and advances it to t_end; fields are (ny, nx) arrays.");

  m.def("known_keys", &known_keys);
  m.def(
      "scenario_echo",
      [](const std::map<std::string, py::object>& cfg) {
        return scenario_to_config(scenario_from_config(to_config(cfg)));
      },
      "Every key with its value after defaults and overrides.");
  m.def(
      "run",
      [](const std::map<std::string, py::object>& cfg, std::uint64_t seed,
         const std::filesystem::path& out_dir) {
        const Scenario s = scenario_from_config(to_config(cfg));
        RunSummary r;
        {
          py::gil_scoped_release nogil;
          r = run_scenario(s, seed, out_dir);
        }
        return r.values;
      },
      py::arg("config"), py::arg("seed"), py::arg("out_dir"),
      "Runs a scenario given as {dotted key: value}; returns the summary values.");
}
