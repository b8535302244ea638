#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridtele/closed_forms.hpp"
#include "hybridtele/sweep.hpp"
#include "hybridtele/teleport.hpp"

namespace py = pybind11;
using namespace hybridtele;

namespace {

HybridType type_arg(const std::string& s) { return parse_hybrid_type(s); }

BackendChoice backend_arg(const std::string& s) {
  if (s == "coherent-algebra") return BackendChoice::coherent_algebra();
  if (s == "truncated-fock") return BackendChoice::truncated_fock();
  throw py::value_error("backend must be 'coherent-algebra' or 'truncated-fock'");
}

py::dict report_dict(const TeleportReport& rep) {
  py::list outcomes;
  for (const auto& e : rep.outcomes) {
    py::dict d;
    d["label"] = to_string(e.label);
    d["correction"] = e.correction ? py::cast(to_string(*e.correction)) : py::none();
    d["relabel"] = e.relabel;
    d["probability"] = e.probability;
    d["fidelity"] = e.fidelity;
    outcomes.append(d);
  }
  py::dict d;
  d["type"] = to_string(rep.type);
  d["alpha"] = rep.alpha;
  d["r"] = rep.loss.r();
  d["t"] = rep.loss.t();
  d["outcomes"] = outcomes;
  d["total_probability"] = rep.total_probability;
  d["success_probability"] = rep.success_probability;
  d["conditional_fidelity"] = rep.conditional_fidelity;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid-qubit teleportation under photon loss";

  py::register_exception<CutoffInsufficientError>(m, "CutoffInsufficientError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  m.def("coherent_overlap", [](cplx a, cplx b) { return inner(LocalKet::coherent(a), LocalKet::coherent(b)); },
        py::arg("a"), py::arg("b"), "<a|b> for two coherent states");
  m.def("balpha_success_probability", &balpha_success_probability, py::arg("alpha"), py::arg("t"));

  m.def("P_I", &P_I, py::arg("alpha"), py::arg("t"));
  m.def("F_I", &F_I, py::arg("alpha"), py::arg("t"));
  m.def("P_II", &P_II, py::arg("alpha"), py::arg("t"));
  m.def(
      "F_II_numeric",
      [](double alpha, double t, int n_u, int n_v) { return F_II_numeric(alpha, t, SphereQuadrature(n_u, n_v)); },
      py::arg("alpha"), py::arg("t"), py::arg("n_u") = 32, py::arg("n_v") = 64);
  m.def(
      "p_formula", [](int i, double alpha, double t, double u, double v) {
        return p_formula(i, alpha, t, BlochAngles(u, v));
      },
      py::arg("i"), py::arg("alpha"), py::arg("t"), py::arg("u"), py::arg("v"));
  m.def(
      "f_formula", [](int i, double alpha, double t, double u, double v) {
        return f_formula(i, alpha, t, BlochAngles(u, v));
      },
      py::arg("i"), py::arg("alpha"), py::arg("t"), py::arg("u"), py::arg("v"));

  m.def(
      "teleport_once",
      [](const std::string& type, double alpha, double r, double u, double v, const std::string& backend) {
        return report_dict(teleport_once(type_arg(type), alpha, LossParameter::from_r(r), BlochAngles(u, v),
                                         backend_arg(backend)));
      },
      py::arg("type"), py::arg("alpha"), py::arg("r"), py::arg("u"), py::arg("v"),
      py::arg("backend") = "coherent-algebra");

  m.def(
      "sphere_averages",
      [](const std::string& type, double alpha, double r, int n_u, int n_v, const std::string& backend) {
        const auto a = sphere_averages(TransferMap(type_arg(type), alpha, LossParameter::from_r(r), backend_arg(backend)),
                                       SphereQuadrature(n_u, n_v));
        return py::make_tuple(a.fidelity, a.success);
      },
      py::arg("type"), py::arg("alpha"), py::arg("r"), py::arg("n_u") = 32, py::arg("n_v") = 64,
      py::arg("backend") = "coherent-algebra", "(average fidelity, average success probability)");

  m.def(
      "bell_decomposition_check",
      [](const std::string& type, double alpha, double u, double v, const std::string& backend) {
        return bell_decomposition_check(type_arg(type), alpha, BlochAngles(u, v), backend_arg(backend));
      },
      py::arg("type"), py::arg("alpha"), py::arg("u"), py::arg("v"), py::arg("backend") = "coherent-algebra");

  m.def(
      "channel_trace_distance",
      [](const std::string& type, double alpha, double r) {
        const auto loss = LossParameter::from_r(r);
        return trace_distance(decohered_channel(type_arg(type), alpha, loss), damped_channel(type_arg(type), alpha, loss));
      },
      py::arg("type"), py::arg("alpha"), py::arg("r"),
      "Trace distance between the closed-form and the mode-by-mode damped channel");

  m.def(
      "sweep_csv",
      [](const std::string& type, std::vector<double> alphas, double r_min, double r_max, double r_step,
         const std::string& engine, int n_u, int n_v) {
        SweepConfig c;
        if (type == "I") c.types = {HybridType::TypeI};
        else if (type == "II") c.types = {HybridType::TypeII};
        else if (type != "both") throw py::value_error("type must be I, II or both");
        c.alphas = std::move(alphas);
        c.r_min = r_min;
        c.r_max = r_max;
        c.r_step = r_step;
        c.engine = parse_engine(engine);
        c.quad_u = n_u;
        c.quad_v = n_v;
        py::gil_scoped_release release;
        return to_csv(run_sweep(c));
      },
      py::arg("type") = "both", py::arg("alphas") = std::vector<double>{1.0, 2.0, 5.0}, py::arg("r_min") = 0.0,
      py::arg("r_max") = 0.98, py::arg("r_step") = 0.02, py::arg("engine") = "closed-form", py::arg("n_u") = 32,
      py::arg("n_v") = 64);
}
