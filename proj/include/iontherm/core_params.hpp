#pragma once

namespace iontherm {

/// CODATA 2018 values in SI units.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;            // J s
  static constexpr double k_boltzmann = 1.380649e-23;        // J / K
  static constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
};

/// Trap geometry and frequencies, all SI (kg, rad/s, rad, m).
struct TrapConfig {
  double mass = 0.0;
  double omega_x0 = 0.0;
  double omega_z = 0.0;
  double taper_angle = 0.0;
  double r0 = 0.0;

  /// Laboratory units: amu, Hz (ordinary frequency), degrees, metres.
  static TrapConfig from_lab_units(double mass_amu, double freq_x0_hz, double freq_z_hz,
                                   double theta_deg, double r0_m);

  /// 40Ca+ in a tapered trap: theta = 30 deg, r0 = 1 mm, 1 MHz radial, 100 kHz axial.
  static TrapConfig calcium_reference();
};

struct DerivedParams {
  double gamma = 0.0;  // tan(theta) / r0, 1/m
  double kappa = 0.0;  // omega_x0 / omega_z
  double tau_z = 0.0;  // half axial period pi / omega_z, s
};

/// Throws Error(InvalidConfig) naming the first violated invariant.
void validate(const TrapConfig& cfg);

DerivedParams derive_params(const TrapConfig& cfg);

/// hbar * omega_x0 * gamma / (m omega_z^2): axial shift per unit of R.
double displacement_per_R(const TrapConfig& cfg);

}  // namespace iontherm
