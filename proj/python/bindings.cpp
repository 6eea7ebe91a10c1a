#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "morsegpe/core_model.hpp"
#include "morsegpe/dynamics.hpp"
#include "morsegpe/error.hpp"
#include "morsegpe/oracle.hpp"
#include "morsegpe/variational.hpp"

namespace py = pybind11;
using namespace morsegpe;

namespace {

py::array_t<double> column(const Trajectory& t, double (*get)(const PacketState&)) {
  py::array_t<double> out(static_cast<py::ssize_t>(t.states.size()));
  auto v = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < t.states.size(); ++i) v(i) = get(t.states[i]);
  return out;
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  d["t"] = py::array_t<double>(static_cast<py::ssize_t>(t.times.size()), t.times.data());
  d["x0"] = column(t, [](const PacketState& s) { return s.x0; });
  d["v"] = column(t, [](const PacketState& s) { return s.v; });
  d["delta"] = column(t, [](const PacketState& s) { return s.width(); });
  d["w"] = column(t, [](const PacketState& s) { return s.w; });
  d["stopped_on_escape"] = t.stopped_on_escape;
  d["failure"] = t.failure ? py::object(py::str(to_string(t.failure->kind)))
                           : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_morsegpe, m) {
  m.doc() = "Morse-trap Gross-Pitaevskii toolkit";
  m.attr("__version__") = MORSEGPE_VERSION;

  static py::handle error_type =
      py::exception<Error>(m, "MorseGPEError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("gamma_to_lambda", &gamma_to_lambda, py::arg("gamma"), py::arg("K"));
  m.def("lambda_to_gamma", &lambda_to_gamma, py::arg("lam"), py::arg("K"));
  m.def("morse_potential", &morse_potential, py::arg("x"));
  m.def(
      "initial_energy",
      [](double K, double gamma, double delta0, double p0) {
        return initial_energy(ScaledParams::from_gamma(K, gamma, delta0, p0));
      },
      py::arg("K"), py::arg("gamma"), py::arg("delta0") = kDefaultWidth, py::arg("p0") = 0.0);

  py::class_<BoundStateResult>(m, "BoundStateResult")
      .def_readonly("alpha_star", &BoundStateResult::alpha_star)
      .def_readonly("energy_full", &BoundStateResult::energy_full)
      .def_readonly("energy_quadratic", &BoundStateResult::energy_quadratic)
      .def_readonly("gradient", &BoundStateResult::gradient)
      .def_readonly("iterations", &BoundStateResult::iterations);

  m.def("energy_alpha", &energy_alpha, py::arg("alpha"), py::arg("K"), py::arg("lam"));
  m.def("energy_gradient", &energy_gradient, py::arg("alpha"), py::arg("K"), py::arg("lam"));
  m.def("interaction_factor", &interaction_factor, py::arg("alpha"));
  m.def(
      "minimize_energy",
      [](double K, double lambda, double tol) {
        MinimizeOptions o;
        o.gradient_tol = tol;
        return minimize_energy(K, lambda, o);
      },
      py::arg("K"), py::arg("lam"), py::arg("gradient_tol") = 1e-10);
  m.def("asymptotic_energy", &asymptotic_energy, py::arg("K"), py::arg("lam"));

  m.def(
      "critical_lambda",
      [](double K, double tol) {
        CriticalOptions o;
        o.tol = tol;
        const CriticalResult r = critical_lambda(K, o);
        return py::dict(py::arg("lambda_c") = r.lambda_c, py::arg("gamma_c") = r.gamma_c,
                        py::arg("bracket") = py::make_tuple(r.bracket_lo, r.bracket_hi),
                        py::arg("evaluations") = r.evaluations);
      },
      py::arg("K"), py::arg("tol") = 1e-6);
  m.def("critical_lambda_asymptotic", &critical_lambda_asymptotic, py::arg("K"));
  m.def(
      "scaling_exponent",
      [](const std::vector<double>& K) {
        const ScalingResult r = scaling_exponent(K);
        return py::make_tuple(r.fit.slope, r.lambda_c);
      },
      py::arg("K_values"));

  m.def(
      "integrate",
      [](double K, double gamma, double p0, double delta0, double t_max, double dt,
         bool adaptive, double sample_interval, double x_stop) {
        IntegratorSettings s;
        s.dt = dt;
        s.mode = adaptive ? StepMode::AdaptiveDormandPrince : StepMode::FixedRK4;
        s.sample_interval = sample_interval;
        s.x_stop = x_stop;
        const Trajectory traj = [&] {
          py::gil_scoped_release release;
          return integrate(PacketState::released(p0, delta0), K, gamma, t_max, s);
        }();
        py::dict d = trajectory_dict(traj);
        const Verdict verdict = classify(traj, kEscapeRadius, t_max);
        d["verdict"] = describe(verdict);
        d["escaped"] = is_escaped(verdict);
        return d;
      },
      py::arg("K"), py::arg("gamma"), py::arg("p0"), py::arg("delta0") = kDefaultWidth,
      py::arg("t_max") = kEscapeHorizon, py::arg("dt") = 1e-3, py::arg("adaptive") = false,
      py::arg("sample_interval") = 1e-2, py::arg("x_stop") = kEscapeRadius);

  m.def(
      "threshold_momentum",
      [](double K, double gamma, double delta0, double tol, double t_max, double x_esc) {
        ThresholdOptions o;
        o.tol = tol;
        o.t_max = t_max;
        o.x_esc = x_esc;
        const ThresholdResult r = [&] {
          py::gil_scoped_release release;
          return threshold_momentum(K, gamma, delta0, o);
        }();
        return py::make_tuple(r.p_th, r.E_th);
      },
      py::arg("K"), py::arg("gamma"), py::arg("delta0") = kDefaultWidth,
      py::arg("tol") = 1e-3, py::arg("t_max") = kEscapeHorizon,
      py::arg("x_esc") = kEscapeRadius);
  m.def("classical_threshold", &classical_threshold, py::arg("x") = 0.0);

  m.def(
      "ground_state_energy",
      [](double K, double lambda, std::size_t n) {
        GroundStateOptions o;
        o.grid.n = n;
        const GroundStateResult r = [&] {
          py::gil_scoped_release release;
          return imaginary_time_ground_state(K, lambda, o);
        }();
        return py::make_tuple(r.energy, r.mean_x);
      },
      py::arg("K"), py::arg("lam"), py::arg("n") = 4096);

  m.def(
      "compare",
      [](double K, double gamma, double delta0, double p0, double t_max,
         const std::string& convention) {
        CompareOptions o;
        o.convention = parse_hbar_convention(convention);
        const ComparisonReport r = [&] {
          py::gil_scoped_release release;
          return compare_with_variational(K, gamma, delta0, p0, t_max, o);
        }();
        return py::dict(py::arg("max_center_deviation") = r.max_center_deviation,
                        py::arg("max_width_deviation") = r.max_width_deviation,
                        py::arg("short_time_center_deviation") = r.short_time_center_deviation,
                        py::arg("ode_verdict") = r.ode_verdict,
                        py::arg("grid_verdict") = r.grid_verdict,
                        py::arg("verdicts_agree") = r.verdicts_agree,
                        py::arg("hbar_eff") = r.hbar_eff);
      },
      py::arg("K"), py::arg("gamma"), py::arg("delta0"), py::arg("p0"), py::arg("t_max"),
      py::arg("convention") = "inverse-K");
}
