#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "kinap/diagnostics.hpp"
#include "kinap/equilibrium.hpp"
#include "kinap/experiments.hpp"
#include "kinap/inequalities.hpp"
#include "kinap/initial_data.hpp"
#include "kinap/mesh.hpp"
#include "kinap/scheme.hpp"

namespace py = pybind11;
using namespace kinap;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Distributions cross the boundary as (N, 2L) float arrays.
CellDistribution to_cells(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("distribution must be a 2-d array of shape (N, 2L)");
  CellDistribution f(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), f.values.begin());
  return f;
}

Array from_cells(const CellDistribution& f) {
  Array out({f.nx, f.nv});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

Array from_vector(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

py::dict run_to_dict(const TrajectoryResult& r) {
  py::dict d;
  d["epsilon"] = r.epsilon;
  d["R"] = r.R;
  d["t"] = from_vector(r.times());
  d["norm_to_eq"] = from_vector(r.series(&DiagnosticsRecord::norm_to_eq));
  d["norm_local"] = from_vector(r.series(&DiagnosticsRecord::norm_local));
  d["rho_dev"] = from_vector(r.series(&DiagnosticsRecord::rho_dev));
  d["h_norm"] = from_vector(r.series(&DiagnosticsRecord::h_norm));
  d["H"] = from_vector(r.series(&DiagnosticsRecord::H));
  d["mass"] = from_vector(r.series(&DiagnosticsRecord::mass));
  d["slack"] = from_vector(r.series(&DiagnosticsRecord::slack));
  d["rate"] = r.rate ? py::cast(r.rate->rate) : py::none();
  d["r_squared"] = r.rate ? py::cast(r.rate->r_squared) : py::none();
  d["period"] = r.period ? py::cast(r.period->period) : py::none();
  py::list heat;
  for (const auto& h : r.heat) heat.append(py::make_tuple(h.t, h.error, h.heat_norm));
  d["heat"] = heat;
  d["max_slack_ratio"] = r.max_slack_ratio;
  d["max_mass_drift"] = r.max_mass_drift;
  d["max_bound_ratio"] = r.max_bound_ratio;
  d["violations"] = r.violations;
  d["seconds"] = r.seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Micro-macro asymptotic-preserving scheme for linear kinetic equations";

  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  py::enum_<Collision>(m, "Collision")
      .value("FokkerPlanck", Collision::FokkerPlanck)
      .value("BGK", Collision::BGK);
  py::enum_<Formulation>(m, "Formulation")
      .value("Direct", Formulation::Direct)
      .value("MicroMacro", Formulation::MicroMacro)
      .value("OverdeterminedMicroMacro", Formulation::OverdeterminedMicroMacro);
  py::enum_<InitialKind>(m, "InitialKind")
      .value("FarEquilibrium", InitialKind::FarEquilibrium)
      .value("CloseEquilibrium", InitialKind::CloseEquilibrium)
      .value("RandomUniform", InitialKind::RandomUniform)
      .value("RandomTruncated", InitialKind::RandomTruncated)
      .value("Ball", InitialKind::Ball)
      .value("Equilibrium", InitialKind::Equilibrium);

  py::class_<VelocityMesh>(m, "VelocityMesh")
      .def_static("uniform", &VelocityMesh::uniform, py::arg("v_star"), py::arg("L"))
      .def_static("from_interfaces",
                  [](const std::vector<double>& iface) { return VelocityMesh::from_interfaces(iface); })
      .def_property_readonly("v_star", &VelocityMesh::v_star)
      .def_property_readonly("L", &VelocityMesh::half_cells)
      .def_property_readonly("centers", [](const VelocityMesh& v) { return from_vector({v.centers().begin(), v.centers().end()}); })
      .def_property_readonly("widths", [](const VelocityMesh& v) { return from_vector({v.widths().begin(), v.widths().end()}); })
      .def_property_readonly("interfaces", [](const VelocityMesh& v) { return from_vector({v.interfaces().begin(), v.interfaces().end()}); })
      .def("__len__", &VelocityMesh::size);

  py::class_<SpatialMesh>(m, "SpatialMesh")
      .def_static("uniform", &SpatialMesh::uniform, py::arg("R"), py::arg("N"))
      .def_static("from_widths", [](const std::vector<double>& w) { return SpatialMesh::from_widths(w); })
      .def_property_readonly("length", &SpatialMesh::length)
      .def_property_readonly("centers", [](const SpatialMesh& x) { return from_vector({x.centers().begin(), x.centers().end()}); })
      .def_property_readonly("widths", [](const SpatialMesh& x) { return from_vector({x.widths().begin(), x.widths().end()}); })
      .def("__len__", &SpatialMesh::size);

  py::class_<DiscreteMaxwellian>(m, "DiscreteMaxwellian")
      .def_static("from_cells", [](const VelocityMesh& v, const std::vector<double>& c) {
        return DiscreteMaxwellian::from_cells(v, c);
      })
      .def_static("from_interfaces", [](const VelocityMesh& v, const std::vector<double>& c) {
        return DiscreteMaxwellian::from_interfaces(v, c);
      })
      .def_property_readonly("kind", &DiscreteMaxwellian::kind)
      .def_property_readonly("cells", [](const DiscreteMaxwellian& M) { return from_vector({M.cells().begin(), M.cells().end()}); })
      .def_property_readonly("m2", &DiscreteMaxwellian::m2)
      .def_property_readonly("m4", &DiscreteMaxwellian::m4)
      .def("moment", [](const DiscreteMaxwellian& M, int k) { return discrete_moment(M, k); });

  m.def("gaussian_bgk", &gaussian_bgk);
  m.def("gaussian_fp", &gaussian_fp);
  m.def("nongaussian_bgk", &nongaussian_bgk);

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init([](double epsilon, double dt, Collision collision, Formulation formulation) {
             SchemeConfig c{epsilon, dt, collision, formulation};
             c.validate();
             return c;
           }),
           py::arg("epsilon") = 1.0, py::arg("dt") = 0.1, py::arg("collision") = Collision::FokkerPlanck,
           py::arg("formulation") = Formulation::OverdeterminedMicroMacro)
      .def_readwrite("epsilon", &SchemeConfig::epsilon)
      .def_readwrite("dt", &SchemeConfig::dt)
      .def_readwrite("collision", &SchemeConfig::collision)
      .def_readwrite("formulation", &SchemeConfig::formulation);

  py::class_<MicroMacroState>(m, "MicroMacroState")
      .def_property_readonly("lambda_", [](const MicroMacroState& s) { return from_vector(s.lambda); })
      .def_property_readonly("h", [](const MicroMacroState& s) {
        Array out({s.nx(), s.h.size() / std::max<std::size_t>(1, s.nx())});
        std::copy(s.h.begin(), s.h.end(), out.mutable_data());
        return out;
      })
      .def_readonly("mu", &MicroMacroState::mu);

  auto phase = [](const SpatialMesh& x, const VelocityMesh& v) { return PhaseMesh{x, v}; };

  m.def("decompose", [phase](const Array& f, const SpatialMesh& x, const VelocityMesh& v,
                             const DiscreteMaxwellian& M, double eps) {
    return decompose(to_cells(f), phase(x, v), M, eps);
  });
  m.def("init_state", [phase](const Array& f, const SpatialMesh& x, const VelocityMesh& v,
                              const DiscreteMaxwellian& M, const SchemeConfig& cfg) {
    return init_state(to_cells(f), phase(x, v), M, cfg);
  });
  m.def("reconstruct", [](const MicroMacroState& s, const DiscreteMaxwellian& M, double eps) {
    return from_cells(reconstruct(s, M, eps));
  });
  m.def("total_mass", [phase](const Array& f, const SpatialMesh& x, const VelocityMesh& v) {
    return total_mass(to_cells(f), phase(x, v));
  });
  m.def("density", [](const Array& f, const VelocityMesh& v) { return from_vector(density(to_cells(f), v)); });
  m.def("weighted_norm", [phase](const Array& f, const SpatialMesh& x, const VelocityMesh& v,
                                 const DiscreteMaxwellian& M) {
    return weighted_norm(to_cells(f), phase(x, v), M);
  });

  py::class_<SchemeSystem>(m, "SchemeSystem")
      .def(py::init([phase](const SchemeConfig& cfg, const SpatialMesh& x, const VelocityMesh& v,
                            const DiscreteMaxwellian& M) { return new SchemeSystem(cfg, phase(x, v), M); }))
      .def("step", [](const SchemeSystem& s, const MicroMacroState& st) { return s.step(st); })
      .def_property_readonly("unknowns", &SchemeSystem::unknowns)
      .def_property_readonly("rows", [](const SchemeSystem& s) { return s.matrix().rows(); });

  m.def("step_direct", [phase](const SchemeConfig& cfg, const SpatialMesh& x, const VelocityMesh& v,
                               const DiscreteMaxwellian& M, const Array& f) {
    return from_cells(step_direct(cfg, phase(x, v), M, to_cells(f)));
  });

  py::class_<HeatScheme>(m, "HeatScheme")
      .def(py::init<const SpatialMesh&, double, double>(), py::arg("mesh"), py::arg("m2"), py::arg("dt"))
      .def("step", [](const HeatScheme& h, const Array& rho) { return from_vector(h.step(to_vector(rho))); });
  m.def("heat_step", [](const Array& rho, double m2, double dt, const SpatialMesh& x) {
    return from_vector(heat_step(to_vector(rho), m2, dt, x));
  });

  m.def("state_norms", [phase](const MicroMacroState& s, const SpatialMesh& x, const VelocityMesh& v,
                               const DiscreteMaxwellian& M, double eps) {
    const StateNorms n = state_norms(s, phase(x, v), M, eps);
    py::dict d;
    d["to_equilibrium"] = n.to_equilibrium;
    d["local"] = n.local;
    d["rho_dev"] = n.rho_dev;
    d["h"] = n.h;
    d["full"] = n.full;
    d["mass"] = n.mass;
    return d;
  });
  m.def("poisson_solve", [](const Array& rho, const SpatialMesh& x) {
    const PoissonSolution s = poisson_solve(to_vector(rho), x);
    return py::make_tuple(from_vector(s.phi), from_vector(s.grad));
  });
  m.def("torus_poincare_constant", &torus_poincare_constant);

  py::class_<EntropyConfig>(m, "EntropyConfig")
      .def_readonly("eta", &EntropyConfig::eta)
      .def_readonly("eta1", &EntropyConfig::eta1)
      .def_readonly("eta2", &EntropyConfig::eta2)
      .def_readonly("K_eta", &EntropyConfig::K_eta)
      .def_readonly("kappa_eta", &EntropyConfig::kappa_eta)
      .def_readonly("beta", &EntropyConfig::beta)
      .def_readonly("C", &EntropyConfig::C);
  m.def("compute_eta_admissible", &compute_eta_admissible, py::arg("M"), py::arg("C_P"), py::arg("dt_max"));

  m.def(
      "fit_decay_rate",
      [](const Array& t, const Array& v, std::optional<std::pair<double, double>> window, double transient) {
        std::optional<FitWindow> w;
        if (window) w = FitWindow{window->first, window->second};
        const RateFit f = fit_decay_rate(to_vector(t), to_vector(v), w, transient);
        return py::make_tuple(f.rate, f.r_squared);
      },
      py::arg("t"), py::arg("values"), py::arg("window") = py::none(), py::arg("transient_fraction") = 0.1);
  m.def(
      "estimate_oscillation_period",
      [](const Array& t, const Array& v, double floor_ratio, double transient) {
        return estimate_oscillation_period(to_vector(t), to_vector(v), floor_ratio, transient).period;
      },
      py::arg("t"), py::arg("values"), py::arg("floor_ratio") = 1e-12, py::arg("transient_fraction") = 0.0);

  m.def("verify_gaussian_poincare", [](const Array& f, const DiscreteMaxwellian& M) {
    const PoincareReport r = verify_gaussian_poincare(to_vector(f), M);
    return py::make_tuple(r.lhs, r.rhs);
  });
  m.def("verify_torus_poincare", [](const Array& phi, const SpatialMesh& x) {
    const PoincareReport r = verify_torus_poincare(to_vector(phi), x);
    return py::make_tuple(r.lhs, r.rhs);
  });
  auto suite_dict = [](const InequalitySuiteReport& r) {
    py::dict d;
    d["samples"] = r.samples;
    d["violations"] = r.violations;
    d["worst_relative_margin"] = r.worst_relative_margin;
    d["extremal_ratio"] = r.extremal_ratio;
    d["k1_ratio"] = r.k1_ratio;
    return d;
  };
  m.def("gaussian_poincare_suite", [suite_dict](const DiscreteMaxwellian& M, std::size_t n, std::uint64_t seed) {
    return suite_dict(gaussian_poincare_suite(M, n, seed));
  }, py::arg("M"), py::arg("samples") = 1000, py::arg("seed") = 20240611);
  m.def("torus_poincare_suite", [suite_dict](const SpatialMesh& x, std::size_t n, std::uint64_t seed) {
    return suite_dict(torus_poincare_suite(x, n, seed));
  }, py::arg("mesh"), py::arg("samples") = 1000, py::arg("seed") = 20240611);

  m.def(
      "generate_initial",
      [phase](InitialKind kind, const SpatialMesh& x, const VelocityMesh& v, const DiscreteMaxwellian& M,
              std::uint64_t seed, double truncation) {
        InitialData init;
        init.kind = kind;
        init.truncation = truncation;
        return from_cells(generate_initial(init, phase(x, v), M, seed));
      },
      py::arg("kind"), py::arg("x"), py::arg("v"), py::arg("M"), py::arg("seed") = 20240611,
      py::arg("truncation") = 3.0);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("preset", &ExperimentConfig::preset)
      .def_static("from_json", &ExperimentConfig::from_json_text)
      .def_static("load", &ExperimentConfig::load)
      .def("to_json", &ExperimentConfig::to_json_text)
      .def_readwrite("epsilons", &ExperimentConfig::epsilons)
      .def_readwrite("t_final", &ExperimentConfig::t_final)
      .def_readwrite("dt", &ExperimentConfig::dt)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_readwrite("strict", &ExperimentConfig::strict)
      .def_readwrite("threads", &ExperimentConfig::threads);

  m.def("simulate", [](const ExperimentConfig& cfg, double eps, std::optional<double> R) {
    TrajectoryResult r;
    {
      py::gil_scoped_release release;
      r = simulate(cfg, eps, R.value_or(cfg.R));
    }
    return run_to_dict(r);
  }, py::arg("config"), py::arg("epsilon"), py::arg("R") = py::none());
  m.def("run", [](const ExperimentConfig& cfg) {
    ExperimentSummary s;
    {
      py::gil_scoped_release release;
      s = run(cfg);
    }
    py::list runs;
    for (const auto& r : s.runs) runs.append(run_to_dict(r));
    return runs;
  });
}
