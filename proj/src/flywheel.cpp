#include "iontherm/flywheel.hpp"

#include <cmath>
#include <string>

#include "iontherm/errors.hpp"

namespace iontherm {

double axial_force(double z, double R, const TrapConfig& cfg, ForceModel model) {
  const double gamma = std::tan(cfg.taper_angle) / cfg.r0;
  const double s = 1.0 + gamma * z;
  if (!(s > 0.0)) {
    throw Error(ErrorKind::OutOfTaper,
                "axial position " + std::to_string(z) + " m lies outside the taper");
  }
  const double restoring = -cfg.mass * cfg.omega_z * cfg.omega_z * z;
  double push = gamma * PhysicalConstants::hbar * cfg.omega_x0 * R;
  if (model == ForceModel::Exact) {
    const double s2 = s * s;
    push /= s2 * s2 * s;
  }
  return restoring + push;
}

double axial_energy(const FlywheelState& s, const TrapConfig& cfg) {
  return 0.5 * cfg.mass * (s.v * s.v + cfg.omega_z * cfg.omega_z * s.z * s.z);
}

}  // namespace iontherm
