#pragma once

#include <optional>
#include <vector>

#include "iontherm/flywheel.hpp"
#include "iontherm/fock.hpp"
#include "iontherm/propagator.hpp"

namespace iontherm {

struct BathSpec {
  double temperature = 0.0;                  // K
  std::optional<SqueezeSpec> squeeze_after;  // applied right after thermalization
};

enum class QuantumBackend { DensityMatrix, Moments };

struct EngineConfig {
  TrapConfig trap = TrapConfig::calcium_reference();
  BathSpec bath_1{1.2e-3, std::nullopt};  // acts at even contacts n = 0, 2, 4, ...
  BathSpec bath_2{1.0e-3, std::nullopt};  // acts at odd contacts
  int n_cycles = 4;
  int dim = 0;        // Fock levels; 0 picks auto_dimension for the more demanding bath
  double dt = 0.0;    // s; 0 means tau_z / 2000
  ForceModel force_model = ForceModel::Approximate;
  QuantumBackend quantum_backend = QuantumBackend::DensityMatrix;
  double z0 = 0.0;    // m
  double v0 = 0.0;    // m/s
  int radial_mode_count = 1;  // 2 doubles the coupling (both radial modes thermalize)
  NewtonConfig newton;
  bool rotating_frame = true;  // density-matrix steps via NewtonPropagator::step_rotating
  int sample_every = 1;  // record every k-th step; 0 keeps only stroke boundaries
};

void validate(const EngineConfig& cfg);

/// Fock dimension actually used for the density-matrix backend.
int resolved_dim(const EngineConfig& cfg);
double resolved_dt(const EngineConfig& cfg);

struct TraceSample {
  double t = 0.0;
  double z = 0.0;
  double v = 0.0;
  double e_flywheel = 0.0;
  double e_working_medium = 0.0;
  double R = 0.0;
  double X = 0.0;
  double Y = 0.0;
  double N = 0.0;
};

/// Axial state at a bath-contact instant, before the radial state is replaced.
struct Peak {
  int n = 0;
  double t = 0.0;
  double z = 0.0;
  double v = 0.0;
};

struct ContactRecord {
  int n = 0;
  int bath = 1;
  double e_flywheel = 0.0;
  double e_wm_before = 0.0;  // NaN at n = 0
  double e_wm_after = 0.0;
  double heat() const { return e_wm_after - e_wm_before; }
};

/// Energy balance over one cycle, from just before contact 2c to just before contact 2c + 2.
struct CycleLedger {
  int cycle = 0;
  double work = 0.0;        // change of flywheel energy
  double heat_bath1 = 0.0;  // signed heat absorbed at contact 2c
  double heat_bath2 = 0.0;  // signed heat absorbed at contact 2c + 1
  double delta_e_wm = 0.0;  // change of working-medium energy
  double residual() const { return work - (heat_bath1 + heat_bath2 - delta_e_wm); }
};

struct EngineTrace {
  int dim = 0;  // 0 for the moments backend
  double dt = 0.0;
  int steps_per_stroke = 0;
  std::vector<TraceSample> samples;
  std::vector<Peak> peaks;  // n = 0 .. 2 n_cycles
  std::vector<ContactRecord> contacts;
  std::vector<CycleLedger> cycles;  // c = 1 .. n_cycles - 1
};

/// Replaces the radial state by the bath's Gibbs state at omega_x0 (then squeezes if asked).
/// The incoming state only fixes the dimension.
RadialState thermalize(const RadialState& state, const BathSpec& bath, const TrapConfig& trap);
GaussianMoments thermalize_moments(const BathSpec& bath, const TrapConfig& trap);

/// The coupled radial/axial system, advanced one mean-field step at a time:
/// kick with F(z, R), drift z, propagate the radial state with H at the step midpoint,
/// refresh R, kick again.
class Engine {
 public:
  explicit Engine(const EngineConfig& cfg);

  const EngineConfig& config() const { return cfg_; }
  double dt() const { return dt_; }
  int steps_per_stroke() const { return steps_per_stroke_; }
  int dim() const { return dim_; }

  /// Instantaneous bath contact; `bath` is 1 or 2.
  void contact(int bath);
  void step();

  const FlywheelState& flywheel() const { return fly_; }
  GaussianMoments moments() const;
  double R() const { return R_; }
  double flywheel_energy() const;
  double working_medium_energy() const;
  /// Null for the moments backend.
  const RadialState* radial_state() const;

 private:
  void refresh_force();

  EngineConfig cfg_;
  double dt_ = 0.0;
  int steps_per_stroke_ = 0;
  int dim_ = 0;
  long long steps_taken_ = 0;
  FlywheelState fly_;
  double R_ = 1.0;
  double force_ = 0.0;
  std::optional<RadialState> rho_;
  GaussianMoments moments_;
  std::optional<RadialState> bath_state_[2];
  GaussianMoments bath_moments_[2];
  std::optional<NewtonPropagator> newton_;
};

EngineTrace run_engine(const EngineConfig& cfg);

struct PeakSeries {
  std::vector<Peak> even;  // contacts with bath 1
  std::vector<Peak> odd;   // contacts with bath 2
};

PeakSeries peak_positions(const EngineTrace& trace);

}  // namespace iontherm
