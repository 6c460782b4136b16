#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "detshock/commands.hpp"
#include "detshock/config.hpp"
#include "detshock/errors.hpp"
#include "detshock/free_boundary.hpp"
#include "detshock/verifier.hpp"

namespace py = pybind11;
using namespace detshock;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> to_grid(const BodyFittedGrid& g, const std::vector<double>& v) {
  py::array_t<double> a({g.nt, g.ns});
  auto m = a.mutable_unchecked<2>();
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.ns; ++i) m(j, i) = v[g.idx(i, j)];
  return a;
}

Config config_from(const std::string& text, const std::vector<std::string>& overrides) {
  Config c = Config::parse(text);
  for (const auto& kv : overrides) c.apply_override(kv);
  return c;
}

// Solves the configured problem and returns plain Python data.
py::dict run_solve(const std::string& text, const std::vector<std::string>& overrides) {
  const RunConfig rc = make_run_config(config_from(text, overrides));
  FreeBoundaryResult r;
  {
    py::gil_scoped_release release;
    r = solve_free_boundary(rc.make_body(), rc.gas, rc.eps, rc.theta_w(), rc.d0,
                            rc.L, rc.fb);
  }
  const BodyFittedGrid& g = r.grid;
  std::vector<double> u1(g.size()), u2(g.size()), mach_v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    u1[k] = r.field.u1(k);
    u2[k] = r.field.u2(k);
    mach_v[k] = mach(rc.gas, r.field.state(k));
  }
  py::dict report;
  for (const auto& e : r.report.entries) report[py::str(e.key)] = e.value;
  py::dict out;
  out["config_hash"] = rc.hash;
  out["converged"] = r.report.converged;
  out["verified"] = r.report.verified;
  out["outer_iterations"] = r.report.outer_iterations;
  out["L"] = rc.L;
  out["report"] = report;
  out["shock_x2"] = to_array(r.shock.nodes());
  out["shock_f"] = to_array(r.shock.values());
  out["x1"] = to_grid(g, g.x1);
  out["x2"] = to_grid(g, g.x2);
  out["psi"] = to_grid(g, r.field.psi);
  out["rho"] = to_grid(g, r.field.rho);
  out["u1"] = to_grid(g, u1);
  out["u2"] = to_grid(g, u2);
  out["mach"] = to_grid(g, mach_v);
  return out;
}

int run_command(const std::string& name, const std::string& config_path,
                const std::string& out_dir, const std::vector<std::string>& overrides) {
  CommandOptions opt;
  opt.config_path = config_path;
  opt.out_dir = out_dir;
  opt.overrides = overrides;
  py::gil_scoped_release release;
  std::ostringstream log, err;
  if (name == "polar") return cmd_polar(opt, log, err);
  if (name == "solve") return cmd_solve(opt, log, err);
  if (name == "verify") return cmd_verify(opt, log, err);
  if (name == "sweep") return cmd_sweep(opt, log, err);
  throw ConfigError("unknown command: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Detached bow shock solver core";

  auto base = py::register_exception<Error>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<BranchCollisionError>(m, "BranchCollisionError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());

  py::class_<GasParams>(m, "GasParams")
      .def(py::init([](double gamma, double b0) { return GasParams{gamma, b0}; }),
           py::arg("gamma") = 2.0, py::arg("b0_bernoulli") = 1.0)
      .def_readwrite("gamma", &GasParams::gamma)
      .def_readwrite("b0_bernoulli", &GasParams::b0_bernoulli);

  py::class_<FlowState>(m, "FlowState")
      .def_readonly("rho", &FlowState::rho)
      .def_readonly("u1", &FlowState::u1)
      .def_readonly("u2", &FlowState::u2);

  m.def("enthalpy", &enthalpy, py::arg("gas"), py::arg("rho"));
  m.def("sound_speed", &sound_speed, py::arg("gas"), py::arg("rho"));
  m.def("rho_sonic", &rho_sonic, py::arg("gas"));
  m.def("rho_max", &rho_max, py::arg("gas"));
  m.def("rho_hat", &rho_hat, py::arg("gas"), py::arg("zeta"), py::arg("rel_tol") = 1e-12);
  m.def("mach_of_rho", &mach_of_rho, py::arg("gas"), py::arg("rho"));
  m.def("incoming_state", &incoming_state, py::arg("gas"), py::arg("eps"));

  py::class_<PolarSolution>(m, "PolarSolution")
      .def_readonly("rho", &PolarSolution::rho)
      .def_readonly("u", &PolarSolution::u)
      .def_readonly("s", &PolarSolution::s);
  py::class_<BranchPair>(m, "BranchPair")
      .def_readonly("strong", &BranchPair::strong)
      .def_readonly("weak", &BranchPair::weak);

  m.def("solve_branches",
        [](const GasParams& g, double eps, double theta_w) {
          return solve_branches(g, eps, theta_w);
        },
        py::arg("gas"), py::arg("eps"), py::arg("theta_w"));
  m.def("detachment_angle",
        [](const GasParams& g, double eps) { return detachment_angle(g, eps); },
        py::arg("gas"), py::arg("eps"));
  m.def("q_gamma_rate",
        [](const GasParams& g, const std::vector<double>& eps, double theta_w) {
          return q_gamma_rate(g, eps, theta_w);
        },
        py::arg("gas"), py::arg("eps_list"), py::arg("theta_w"));
  m.def("polar_curve",
        [](const GasParams& g, double eps, int n) {
          const PolarCurve pc = polar_curve(g, eps, n);
          std::vector<double> u, v;
          for (const auto& [a, b] : pc.samples) {
            u.push_back(a);
            v.push_back(b);
          }
          return py::make_tuple(to_array(u), to_array(v));
        },
        py::arg("gas"), py::arg("eps"), py::arg("n_samples") = 129);

  py::class_<BluntBody>(m, "BluntBody")
      .def("b", &BluntBody::b)
      .def("d1", &BluntBody::d1)
      .def("d2", &BluntBody::d2)
      .def_property_readonly("b0", &BluntBody::b0)
      .def_property_readonly("h0", &BluntBody::h0)
      .def_property_readonly("theta_w", &BluntBody::theta_w);
  m.def("default_body", &default_body, py::arg("theta_w"), py::arg("h0"));
  m.def("min_cutoff_height", &min_cutoff_height, py::arg("body"), py::arg("d0"));

  m.def("config_hash",
        [](const std::string& text) { return Config::parse(text).hash(); },
        py::arg("text"));
  m.def("solve", &run_solve, py::arg("config_text"),
        py::arg("overrides") = std::vector<std::string>{},
        "Run the free-boundary solve for a key = value configuration.");
  m.def("run_command", &run_command, py::arg("command"), py::arg("config_path"),
        py::arg("out_dir") = "", py::arg("overrides") = std::vector<std::string>{},
        "Run a CLI subcommand in process; returns its exit code.");
}
