#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "iontherm/analytics.hpp"
#include "iontherm/config.hpp"
#include "iontherm/engine.hpp"
#include "iontherm/errors.hpp"
#include "iontherm/experiments.hpp"
#include "iontherm/fock.hpp"
#include "iontherm/propagator.hpp"
#include "iontherm/thermometry.hpp"

namespace py = pybind11;
using namespace iontherm;

namespace {

py::array_t<double> column(const std::vector<TraceSample>& s, double TraceSample::*field) {
  py::array_t<double> out(static_cast<py::ssize_t>(s.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < s.size(); ++i) view(static_cast<py::ssize_t>(i)) = s[i].*field;
  return out;
}

py::dict trace_to_dict(const EngineTrace& trace) {
  py::dict samples;
  samples["t"] = column(trace.samples, &TraceSample::t);
  samples["z"] = column(trace.samples, &TraceSample::z);
  samples["v"] = column(trace.samples, &TraceSample::v);
  samples["e_flywheel"] = column(trace.samples, &TraceSample::e_flywheel);
  samples["e_working_medium"] = column(trace.samples, &TraceSample::e_working_medium);
  samples["R"] = column(trace.samples, &TraceSample::R);
  samples["X"] = column(trace.samples, &TraceSample::X);
  samples["Y"] = column(trace.samples, &TraceSample::Y);
  samples["N"] = column(trace.samples, &TraceSample::N);

  std::vector<int> n;
  std::vector<double> t, z, v;
  for (const auto& p : trace.peaks) {
    n.push_back(p.n);
    t.push_back(p.t);
    z.push_back(p.z);
    v.push_back(p.v);
  }
  py::dict peaks;
  peaks["n"] = py::array(py::cast(n));
  peaks["t"] = py::array(py::cast(t));
  peaks["z"] = py::array(py::cast(z));
  peaks["v"] = py::array(py::cast(v));

  py::list cycles;
  for (const auto& c : trace.cycles) {
    py::dict d;
    d["cycle"] = c.cycle;
    d["work"] = c.work;
    d["heat_bath1"] = c.heat_bath1;
    d["heat_bath2"] = c.heat_bath2;
    d["delta_e_wm"] = c.delta_e_wm;
    d["residual"] = c.residual();
    cycles.append(d);
  }
  py::dict out;
  out["dim"] = trace.dim;
  out["dt"] = trace.dt;
  out["steps_per_stroke"] = trace.steps_per_stroke;
  out["samples"] = samples;
  out["peaks"] = peaks;
  out["cycles"] = cycles;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tapered-trap ion heat engine: Fock-space propagation, engine loop, closed forms";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<TrapConfig>(m, "TrapConfig")
      .def(py::init<>())
      .def_static("from_lab_units", &TrapConfig::from_lab_units, py::arg("mass_amu"),
                  py::arg("freq_x0_hz"), py::arg("freq_z_hz"), py::arg("theta_deg"),
                  py::arg("r0_m"))
      .def_static("calcium_reference", &TrapConfig::calcium_reference)
      .def_readwrite("mass", &TrapConfig::mass)
      .def_readwrite("omega_x0", &TrapConfig::omega_x0)
      .def_readwrite("omega_z", &TrapConfig::omega_z)
      .def_readwrite("taper_angle", &TrapConfig::taper_angle)
      .def_readwrite("r0", &TrapConfig::r0);

  py::class_<DerivedParams>(m, "DerivedParams")
      .def_readonly("gamma", &DerivedParams::gamma)
      .def_readonly("kappa", &DerivedParams::kappa)
      .def_readonly("tau_z", &DerivedParams::tau_z);
  m.def("derive_params", &derive_params, py::arg("trap"));
  m.def("displacement_per_R", &displacement_per_R, py::arg("trap"));

  // fock
  py::class_<SqueezeSpec>(m, "SqueezeSpec")
      .def(py::init([](double r, double alpha) { return SqueezeSpec{r, alpha}; }),
           py::arg("r") = 0.0, py::arg("alpha") = 0.0)
      .def_readwrite("r", &SqueezeSpec::r)
      .def_readwrite("alpha", &SqueezeSpec::alpha);

  py::class_<GaussianMoments>(m, "GaussianMoments")
      .def(py::init([](double x, double y, double n) { return GaussianMoments{x, y, n}; }),
           py::arg("X") = 0.0, py::arg("Y") = 0.0, py::arg("N") = 0.0)
      .def_readwrite("X", &GaussianMoments::X)
      .def_readwrite("Y", &GaussianMoments::Y)
      .def_readwrite("N", &GaussianMoments::N)
      .def_property_readonly("R", &GaussianMoments::R)
      .def("uncertainty_product", &GaussianMoments::uncertainty_product)
      .def("__repr__", [](const GaussianMoments& g) {
        return "GaussianMoments(X=" + std::to_string(g.X) + ", Y=" + std::to_string(g.Y) +
               ", N=" + std::to_string(g.N) + ")";
      });

  py::class_<RadialState>(m, "RadialState")
      .def(py::init<ComplexMatrix>(), py::arg("rho"))
      .def_property_readonly("dim", &RadialState::dim)
      .def_property_readonly("rho", &RadialState::rho);

  m.def("thermal_occupation", &thermal_occupation, py::arg("temperature"), py::arg("omega"));
  m.def("thermal_state", &thermal_state, py::arg("n_th"), py::arg("dim"));
  m.def("squeeze", &squeeze, py::arg("state"), py::arg("spec"));
  m.def("moments", &moments, py::arg("state"));
  m.def("squeezed_thermal_moments", &squeezed_thermal_moments, py::arg("n_th"), py::arg("spec"));
  m.def("auto_dimension", &auto_dimension, py::arg("n_th"), py::arg("r") = 0.0);

  // propagator
  m.def("coupling_g", &coupling_g, py::arg("z"), py::arg("trap"));
  m.def(
      "newton_propagate",
      [](const RadialState& s, double dt, double z, const TrapConfig& trap) {
        return newton_propagate(s, {dt, z}, trap);
      },
      py::arg("state"), py::arg("dt"), py::arg("z"), py::arg("trap"));
  m.def(
      "dense_propagate_oracle",
      [](const RadialState& s, double dt, double z, const TrapConfig& trap) {
        return dense_propagate_oracle(s, {dt, z}, trap);
      },
      py::arg("state"), py::arg("dt"), py::arg("z"), py::arg("trap"));
  m.def("moments_step", &moments_step, py::arg("moments"), py::arg("g"), py::arg("dt"),
        py::arg("omega_x0"));

  // engine
  py::enum_<ForceModel>(m, "ForceModel")
      .value("Approximate", ForceModel::Approximate)
      .value("Exact", ForceModel::Exact);
  py::enum_<QuantumBackend>(m, "QuantumBackend")
      .value("DensityMatrix", QuantumBackend::DensityMatrix)
      .value("Moments", QuantumBackend::Moments);
  m.def("axial_force", &axial_force, py::arg("z"), py::arg("R"), py::arg("trap"),
        py::arg("model") = ForceModel::Approximate);

  py::class_<BathSpec>(m, "BathSpec")
      .def(py::init([](double t, std::optional<SqueezeSpec> sq) { return BathSpec{t, sq}; }),
           py::arg("temperature"), py::arg("squeeze_after") = std::nullopt)
      .def_readwrite("temperature", &BathSpec::temperature)
      .def_readwrite("squeeze_after", &BathSpec::squeeze_after);

  py::class_<EngineConfig>(m, "EngineConfig")
      .def(py::init<>())
      .def_readwrite("trap", &EngineConfig::trap)
      .def_readwrite("bath_1", &EngineConfig::bath_1)
      .def_readwrite("bath_2", &EngineConfig::bath_2)
      .def_readwrite("n_cycles", &EngineConfig::n_cycles)
      .def_readwrite("dim", &EngineConfig::dim)
      .def_readwrite("dt", &EngineConfig::dt)
      .def_readwrite("force_model", &EngineConfig::force_model)
      .def_readwrite("quantum_backend", &EngineConfig::quantum_backend)
      .def_readwrite("z0", &EngineConfig::z0)
      .def_readwrite("v0", &EngineConfig::v0)
      .def_readwrite("radial_mode_count", &EngineConfig::radial_mode_count)
      .def_readwrite("sample_every", &EngineConfig::sample_every)
      .def_readwrite("rotating_frame", &EngineConfig::rotating_frame);

  m.def(
      "run_engine",
      [](const EngineConfig& cfg) {
        EngineTrace trace;
        {
          py::gil_scoped_release release;
          trace = run_engine(cfg);
        }
        return trace_to_dict(trace);
      },
      py::arg("config"));

  // analytics
  py::class_<AnalyticContext>(m, "AnalyticContext")
      .def(py::init<const TrapConfig&>(), py::arg("trap"))
      .def_readonly("trap", &AnalyticContext::trap)
      .def_readonly("derived", &AnalyticContext::derived)
      .def_readonly("shift_per_R", &AnalyticContext::shift_per_R);
  py::enum_<GrowthMode>(m, "GrowthMode")
      .value("Exact", GrowthMode::Exact)
      .value("HighT", GrowthMode::HighT);
  m.def("radial_frequency", &radial_frequency, py::arg("z"), py::arg("ctx"));
  m.def("thermal_R", &thermal_R, py::arg("temperature"), py::arg("ctx"));
  m.def("stroboscopic_position", &stroboscopic_position, py::arg("n"), py::arg("z0"),
        py::arg("t1"), py::arg("t2"), py::arg("ctx"));
  m.def("delta_z", &delta_z, py::arg("t1"), py::arg("t2"), py::arg("ctx"),
        py::arg("mode") = GrowthMode::Exact);
  m.def("protocol_amplitude", &protocol_amplitude, py::arg("n_cycles"), py::arg("t1"),
        py::arg("t2"), py::arg("ctx"));
  m.def("amplification", py::overload_cast<double, double, double>(&amplification), py::arg("r"),
        py::arg("alpha"), py::arg("kappa"));
  m.def("delta_z_squeezed", &delta_z_squeezed, py::arg("t1"), py::arg("t2"), py::arg("spec"),
        py::arg("ctx"), py::arg("mode") = GrowthMode::Exact);
  m.def("squeeze_quantum_threshold", &squeeze_quantum_threshold, py::arg("n_th"));

  // thermometry
  py::enum_<ProtocolBackend>(m, "ProtocolBackend")
      .value("Analytic", ProtocolBackend::Analytic)
      .value("FullSimulation", ProtocolBackend::FullSimulation);
  py::class_<ProtocolConfig>(m, "ProtocolConfig")
      .def(py::init<>())
      .def_readwrite("t0", &ProtocolConfig::t0)
      .def_readwrite("n_cycles", &ProtocolConfig::n_cycles)
      .def_readwrite("m", &ProtocolConfig::m)
      .def_readwrite("sigma_shot", &ProtocolConfig::sigma_shot)
      .def_readwrite("pulse_fraction", &ProtocolConfig::pulse_fraction)
      .def_readwrite("seed", &ProtocolConfig::seed)
      .def_readwrite("backend", &ProtocolConfig::backend)
      .def_readwrite("max_full_cycles", &ProtocolConfig::max_full_cycles)
      .def_readwrite("threads", &ProtocolConfig::threads);
  py::class_<MeasurementRecord>(m, "MeasurementRecord")
      .def_readonly("set_a", &MeasurementRecord::set_a)
      .def_readonly("set_b", &MeasurementRecord::set_b)
      .def_readonly("mean_a", &MeasurementRecord::mean_a)
      .def_readonly("mean_b", &MeasurementRecord::mean_b)
      .def_readonly("sem_a", &MeasurementRecord::sem_a)
      .def_readonly("sem_b", &MeasurementRecord::sem_b)
      .def_readonly("n_cycles", &MeasurementRecord::n_cycles)
      .def_readonly("pulse_fraction", &MeasurementRecord::pulse_fraction)
      .def_readonly("seed", &MeasurementRecord::seed);
  py::class_<TemperatureEstimate>(m, "TemperatureEstimate")
      .def_readonly("delta_T_hat", &TemperatureEstimate::delta_T_hat)
      .def_readonly("sigma_delta_T", &TemperatureEstimate::sigma_delta_T)
      .def_readonly("amplitude", &TemperatureEstimate::amplitude);
  m.def("run_protocol", &run_protocol, py::arg("protocol"), py::arg("engine"),
        py::call_guard<py::gil_scoped_release>());
  m.def("estimate_delta_T", &estimate_delta_T, py::arg("record"), py::arg("ctx"));
  m.def("sensitivity", &sensitivity, py::arg("sigma_mean"), py::arg("n_cycles"), py::arg("ctx"));

  // config and experiments
  py::class_<RunConfig>(m, "RunConfig")
      .def("trap", &RunConfig::trap)
      .def("engine", &RunConfig::engine)
      .def("protocol", &RunConfig::protocol)
      .def("entries", [](const RunConfig& c) { return config_entries(c); });
  m.def("parse_config_text", &parse_config_text, py::arg("text"),
        py::arg("origin") = std::string("<config>"));
  m.def("parse_config", &parse_config, py::arg("path"));
  m.def(
      "apply_overrides",
      [](RunConfig cfg, const std::vector<std::string>& overrides) {
        apply_overrides(cfg, overrides);
        return cfg;
      },
      py::arg("config"), py::arg("overrides"));
  m.def(
      "run_experiment",
      [](const RunConfig& cfg, const std::string& command, const std::filesystem::path& out,
         int threads) {
        const auto c = parse_command(command);
        if (!c) throw Error(ErrorKind::InvalidConfig, "unknown command '" + command + "'");
        const auto result = run_experiment(cfg, *c, out, threads);
        return py::make_tuple(result.files, result.summary_json);
      },
      py::arg("config"), py::arg("command"), py::arg("output_dir"), py::arg("threads") = 0);
}
