#pragma once

#include "iontherm/core_params.hpp"

namespace iontherm {

/// Classical axial coordinate of the ion.
struct FlywheelState {
  double z = 0.0;  // m
  double v = 0.0;  // m/s
  double t = 0.0;  // s
};

enum class ForceModel {
  Approximate,  // -m wz^2 z + gamma hbar wx0 R
  Exact,        // -m wz^2 z + gamma hbar wx0 R / (1 + gamma z)^5
};

/// Mean-field axial force for a radial second moment R. Throws OutOfTaper when 1 + gamma z <= 0.
/// The dR/dz contribution is not modelled: R is a functional of the radial state only.
double axial_force(double z, double R, const TrapConfig& cfg, ForceModel model);

/// Kinetic plus harmonic potential energy of the flywheel.
double axial_energy(const FlywheelState& s, const TrapConfig& cfg);

inline FlywheelState half_kick(FlywheelState s, double force, double dt, double mass) {
  s.v += 0.5 * dt * force / mass;
  return s;
}

inline FlywheelState drift(FlywheelState s, double dt) {
  s.z += dt * s.v;
  s.t += dt;
  return s;
}

/// Velocity Verlet (Stoermer-Verlet) step: half kick, drift, half kick. `force(z)` returns the
/// total axial force in newtons. Negative dt integrates backwards.
template <class Force>
FlywheelState verlet_step(const FlywheelState& s, Force&& force, double dt, double mass) {
  FlywheelState out = half_kick(s, force(s.z), dt, mass);
  out = drift(out, dt);
  return half_kick(out, force(out.z), dt, mass);
}

}  // namespace iontherm
