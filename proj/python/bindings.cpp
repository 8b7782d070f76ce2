#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "elastic/exponents.hpp"
#include "elastic/semilinear.hpp"

namespace py = pybind11;
using namespace elastic;

namespace {

std::string classify_json(const std::array<double, 3>& p, double m, double s, double theta, const std::string& regime,
                          double eps1) {
  return to_json(classify_and_g(make_triple(p[0], p[1], p[2]), m, s, theta, exponent_regime_from_string(regime), eps1))
      .dump();
}

std::string simulate_json(const std::array<double, 3>& p, double theta, int N, double L, double dt, double T,
                          double delta, double t_ref, const std::string& regime) {
  RunConfig c = default_run_config();
  c.params = make_params(1.0, 4.0, theta);
  c.triple = make_triple(p[0], p[1], p[2]);
  c.N = N;
  c.L = L;
  c.dt = dt;
  c.T = T;
  c.delta = delta;
  c.t_ref = t_ref;
  c.regime = exponent_regime_from_string(regime);
  nlohmann::json j = to_json(run(c));
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings of the elastic spectral laboratory";
  m.attr("__version__") = kVersion;
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  m.def(
      "default_epsilon", [](double b2, double theta) { return default_epsilon(b2, theta); }, py::arg("b2"),
      py::arg("theta"));
  m.def(
      "exact_roots",
      [](double a2, double b2, double theta, double xi) {
        const auto r = exact_roots6(make_params(a2, b2, theta), xi);
        return std::vector<cplx>(r.begin(), r.end());
      },
      py::arg("a2"), py::arg("b2"), py::arg("theta"), py::arg("xi"));
  m.def("critical_exponent", &critical_exponent, py::arg("m"), py::arg("theta"));
  m.def("balanced_exponent", &balanced_exponent, py::arg("m"), py::arg("s"), py::arg("theta"));
  m.def("_classify_json", &classify_json, py::arg("p"), py::arg("m"), py::arg("s"), py::arg("theta"),
        py::arg("regime"), py::arg("eps1"));
  m.def("_simulate_json", &simulate_json, py::arg("p"), py::arg("theta"), py::arg("N"), py::arg("L"), py::arg("dt"),
        py::arg("T"), py::arg("delta"), py::arg("t_ref"), py::arg("regime"),
        py::call_guard<py::gil_scoped_release>());
}
