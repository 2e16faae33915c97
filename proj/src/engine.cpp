#include "iontherm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "iontherm/errors.hpp"

namespace iontherm {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, message);
}

void validate(const BathSpec& bath, const char* name) {
  require(std::isfinite(bath.temperature) && bath.temperature >= 0.0,
          std::string(name) + " temperature must be >= 0");
  if (bath.squeeze_after) {
    require(std::isfinite(bath.squeeze_after->r) && bath.squeeze_after->r >= 0.0 &&
                std::isfinite(bath.squeeze_after->alpha),
            std::string(name) + " squeeze amplitude must be finite and >= 0");
  }
}

double squeeze_r(const BathSpec& bath) { return bath.squeeze_after ? bath.squeeze_after->r : 0.0; }

}  // namespace

void validate(const EngineConfig& cfg) {
  validate(cfg.trap);
  validate(cfg.bath_1, "bath_1");
  validate(cfg.bath_2, "bath_2");
  require(cfg.n_cycles >= 1, "n_cycles must be >= 1");
  require(cfg.dim == 0 || cfg.dim >= 2, "dim must be 0 (auto) or >= 2");
  require(cfg.radial_mode_count == 1 || cfg.radial_mode_count == 2,
          "radial_mode_count must be 1 or 2");
  require(cfg.sample_every >= 0, "sample_every must be >= 0");
  require(std::isfinite(cfg.z0) && std::isfinite(cfg.v0), "initial conditions must be finite");
  validate(cfg.newton);
  const double tau_z = std::numbers::pi / cfg.trap.omega_z;
  if (cfg.dt != 0.0) {
    require(cfg.dt > 0.0 && cfg.dt <= tau_z / 100.0 * (1.0 + 1e-12),
            "dt must satisfy 0 < dt <= tau_z/100");
    const double ratio = tau_z / cfg.dt;
    require(std::abs(ratio - std::round(ratio)) <= 1e-6 * ratio,
            "dt must divide tau_z to within one part in 1e6");
  }
}

int resolved_dim(const EngineConfig& cfg) {
  if (cfg.dim != 0) return cfg.dim;
  const double w = cfg.trap.omega_x0;
  return std::max(auto_dimension(thermal_occupation(cfg.bath_1.temperature, w), squeeze_r(cfg.bath_1)),
                  auto_dimension(thermal_occupation(cfg.bath_2.temperature, w), squeeze_r(cfg.bath_2)));
}

double resolved_dt(const EngineConfig& cfg) {
  const double tau_z = std::numbers::pi / cfg.trap.omega_z;
  return cfg.dt != 0.0 ? cfg.dt : tau_z / 2000.0;
}

RadialState thermalize(const RadialState& state, const BathSpec& bath, const TrapConfig& trap) {
  RadialState out = thermal_state(thermal_occupation(bath.temperature, trap.omega_x0), state.dim());
  if (bath.squeeze_after) out = squeeze(out, *bath.squeeze_after);
  return out;
}

GaussianMoments thermalize_moments(const BathSpec& bath, const TrapConfig& trap) {
  const double n_th = thermal_occupation(bath.temperature, trap.omega_x0);
  return squeezed_thermal_moments(n_th, bath.squeeze_after.value_or(SqueezeSpec{}));
}

Engine::Engine(const EngineConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  dt_ = resolved_dt(cfg_);
  steps_per_stroke_ = static_cast<int>(std::lround(std::numbers::pi / cfg_.trap.omega_z / dt_));
  fly_ = {cfg_.z0, cfg_.v0, 0.0};
  const BathSpec* baths[2] = {&cfg_.bath_1, &cfg_.bath_2};
  for (int b = 0; b < 2; ++b) bath_moments_[b] = thermalize_moments(*baths[b], cfg_.trap);
  if (cfg_.quantum_backend == QuantumBackend::DensityMatrix) {
    dim_ = resolved_dim(cfg_);
    const RadialState seed(ComplexMatrix::Zero(dim_, dim_));
    for (int b = 0; b < 2; ++b) bath_state_[b] = thermalize(seed, *baths[b], cfg_.trap);
    newton_.emplace(cfg_.newton);
  }
  // Until the first contact the radial mode is taken to be in bath 1's state.
  contact(1);
}

void Engine::contact(int bath) {
  if (bath != 1 && bath != 2) throw Error(ErrorKind::InvalidConfig, "bath index must be 1 or 2");
  const int b = bath - 1;
  if (rho_ || bath_state_[b]) {
    rho_ = bath_state_[b];
    moments_ = iontherm::moments(*rho_);
  } else {
    moments_ = bath_moments_[b];
  }
  R_ = moments_.R();
  refresh_force();
}

void Engine::refresh_force() {
  force_ = axial_force(fly_.z, cfg_.radial_mode_count * R_, cfg_.trap, cfg_.force_model);
}

void Engine::step() {
  const double mass = cfg_.trap.mass;
  const double z_old = fly_.z;
  FlywheelState s = half_kick(fly_, force_, dt_, mass);
  s = drift(s, dt_);
  const double z_mid = 0.5 * (z_old + s.z);
  if (rho_) {
    if (cfg_.rotating_frame) {
      *rho_ = newton_->step_rotating(*rho_, coupling_g(z_mid, cfg_.trap), cfg_.trap.omega_x0, dt_);
    } else {
      *rho_ = newton_->step(*rho_, radial_hamiltonian(dim_, z_mid, cfg_.trap), dt_);
    }
    moments_ = iontherm::moments(*rho_);
  } else {
    moments_ = moments_step(moments_, coupling_g(z_mid, cfg_.trap), dt_, cfg_.trap.omega_x0);
  }
  R_ = moments_.R();
  fly_ = s;
  ++steps_taken_;
  fly_.t = static_cast<double>(steps_taken_) * dt_;
  refresh_force();
  fly_ = half_kick(fly_, force_, dt_, mass);
}

GaussianMoments Engine::moments() const { return moments_; }

double Engine::flywheel_energy() const { return axial_energy(fly_, cfg_.trap); }

double Engine::working_medium_energy() const {
  return cfg_.radial_mode_count * radial_energy(moments_, fly_.z, cfg_.trap);
}

const RadialState* Engine::radial_state() const { return rho_ ? &*rho_ : nullptr; }

namespace {

TraceSample sample_of(const Engine& e) {
  const auto& f = e.flywheel();
  const auto m = e.moments();
  return {f.t, f.z, f.v, e.flywheel_energy(), e.working_medium_energy(), m.R(), m.X, m.Y, m.N};
}

}  // namespace

EngineTrace run_engine(const EngineConfig& cfg) {
  Engine engine(cfg);
  EngineTrace trace;
  trace.dim = engine.dim();
  trace.dt = engine.dt();
  trace.steps_per_stroke = engine.steps_per_stroke();
  const int contacts = 2 * cfg.n_cycles;
  const int every = cfg.sample_every;
  if (every > 0) {
    trace.samples.reserve(static_cast<std::size_t>(contacts) * engine.steps_per_stroke() / every + 2);
  }

  std::vector<double> e_fly_pre;
  std::vector<double> e_wm_pre;
  for (int n = 0; n <= contacts; ++n) {
    const auto& f = engine.flywheel();
    trace.peaks.push_back({n, f.t, f.z, f.v});
    e_fly_pre.push_back(engine.flywheel_energy());
    e_wm_pre.push_back(n == 0 ? std::numeric_limits<double>::quiet_NaN()
                              : engine.working_medium_energy());
    if (n == contacts) {
      trace.samples.push_back(sample_of(engine));
      break;
    }

    const int bath = n % 2 == 0 ? 1 : 2;
    engine.contact(bath);
    trace.contacts.push_back({n, bath, engine.flywheel_energy(), e_wm_pre.back(),
                              engine.working_medium_energy()});
    for (int k = 0; k < engine.steps_per_stroke(); ++k) {
      if (k == 0 || (every > 0 && k % every == 0)) trace.samples.push_back(sample_of(engine));
      engine.step();
    }
  }

  for (int c = 1; c < cfg.n_cycles; ++c) {
    CycleLedger ledger;
    ledger.cycle = c;
    ledger.work = e_fly_pre[2 * c + 2] - e_fly_pre[2 * c];
    ledger.heat_bath1 = trace.contacts[2 * c].heat();
    ledger.heat_bath2 = trace.contacts[2 * c + 1].heat();
    ledger.delta_e_wm = e_wm_pre[2 * c + 2] - e_wm_pre[2 * c];
    trace.cycles.push_back(ledger);
  }
  return trace;
}

PeakSeries peak_positions(const EngineTrace& trace) {
  PeakSeries series;
  for (const auto& p : trace.peaks) (p.n % 2 == 0 ? series.even : series.odd).push_back(p);
  return series;
}

}  // namespace iontherm
