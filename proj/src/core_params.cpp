#include "iontherm/core_params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "iontherm/errors.hpp"

namespace iontherm {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::InvalidConfig, message);
}

}  // namespace

TrapConfig TrapConfig::from_lab_units(double mass_amu, double freq_x0_hz, double freq_z_hz,
                                      double theta_deg, double r0_m) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  TrapConfig cfg;
  cfg.mass = mass_amu * PhysicalConstants::atomic_mass_unit;
  cfg.omega_x0 = two_pi * freq_x0_hz;
  cfg.omega_z = two_pi * freq_z_hz;
  cfg.taper_angle = theta_deg * std::numbers::pi / 180.0;
  cfg.r0 = r0_m;
  return cfg;
}

TrapConfig TrapConfig::calcium_reference() {
  return from_lab_units(40.0, 1.0e6, 1.0e5, 30.0, 1.0e-3);
}

void validate(const TrapConfig& cfg) {
  require(std::isfinite(cfg.mass) && cfg.mass > 0.0, "mass must be positive");
  require(std::isfinite(cfg.omega_x0) && cfg.omega_x0 > 0.0, "omega_x0 must be positive");
  require(std::isfinite(cfg.omega_z) && cfg.omega_z > 0.0, "omega_z must be positive");
  require(std::isfinite(cfg.r0) && cfg.r0 > 0.0, "r0 must be positive");
  require(std::isfinite(cfg.taper_angle) && cfg.taper_angle > 0.0 &&
              cfg.taper_angle < std::numbers::pi / 2.0,
          "taper angle must lie in (0, pi/2)");
  require(cfg.omega_x0 > cfg.omega_z, "omega_x0 must exceed omega_z");
}

DerivedParams derive_params(const TrapConfig& cfg) {
  validate(cfg);
  DerivedParams d;
  d.gamma = std::tan(cfg.taper_angle) / cfg.r0;
  d.kappa = cfg.omega_x0 / cfg.omega_z;
  d.tau_z = std::numbers::pi / cfg.omega_z;
  return d;
}

double displacement_per_R(const TrapConfig& cfg) {
  const double gamma = std::tan(cfg.taper_angle) / cfg.r0;
  return PhysicalConstants::hbar * cfg.omega_x0 * gamma / (cfg.mass * cfg.omega_z * cfg.omega_z);
}

}  // namespace iontherm
