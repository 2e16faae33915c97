#include "iontherm/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "iontherm/errors.hpp"

namespace iontherm {

AnalyticContext::AnalyticContext(const TrapConfig& cfg)
    : trap(cfg), derived(derive_params(cfg)), shift_per_R(displacement_per_R(cfg)) {}

double radial_frequency(double z, const AnalyticContext& ctx) {
  const double s = 1.0 + ctx.derived.gamma * z;
  if (!(s > 0.0)) {
    throw Error(ErrorKind::OutOfTaper,
                "axial position " + std::to_string(z) + " m lies outside the taper");
  }
  return ctx.trap.omega_x0 / (s * s);
}

double thermal_R(double temperature, const AnalyticContext& ctx) {
  if (temperature <= 0.0) return 1.0;
  const double x = PhysicalConstants::hbar * ctx.trap.omega_x0 /
                   (2.0 * PhysicalConstants::k_boltzmann * temperature);
  return 1.0 / std::tanh(x);
}

namespace {

// R in the requested approximation; HighT keeps only the leading 2kT / (hbar omega) term.
double bath_R(double temperature, const AnalyticContext& ctx, GrowthMode mode) {
  if (mode == GrowthMode::Exact) return thermal_R(temperature, ctx);
  return 2.0 * PhysicalConstants::k_boltzmann * temperature /
         (PhysicalConstants::hbar * ctx.trap.omega_x0);
}

}  // namespace

double stroboscopic_position_R(int n, double z0, double r1, double r2, const AnalyticContext& ctx) {
  if (n < 0) throw Error(ErrorKind::InvalidConfig, "contact index must be >= 0");
  // Each stroke reflects z about the equilibrium a R of the bath just contacted.
  const double growth = 2.0 * ctx.shift_per_R * (r2 - r1);
  const double even = z0 + (n / 2) * growth;
  if (n % 2 == 0) return even;
  return 2.0 * ctx.shift_per_R * r1 - even;
}

double stroboscopic_position(int n, double z0, double t1, double t2, const AnalyticContext& ctx) {
  return stroboscopic_position_R(n, z0, thermal_R(t1, ctx), thermal_R(t2, ctx), ctx);
}

std::vector<double> stroboscopic_positions(int n_max, double z0, double t1, double t2,
                                           const AnalyticContext& ctx) {
  std::vector<double> out;
  out.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out.push_back(stroboscopic_position(n, z0, t1, t2, ctx));
  return out;
}

double delta_z(double t1, double t2, const AnalyticContext& ctx, GrowthMode mode) {
  return 2.0 * ctx.shift_per_R * (bath_R(t2, ctx, mode) - bath_R(t1, ctx, mode));
}

double protocol_amplitude(int n_cycles, double t1, double t2, const AnalyticContext& ctx) {
  if (n_cycles < 1) throw Error(ErrorKind::InvalidConfig, "protocol needs N >= 1 cycles");
  return 2.0 * n_cycles * delta_z(t1, t2, ctx);
}

double amplification(double r, double alpha, double kappa) {
  if (!(kappa > 0.5)) throw Error(ErrorKind::InvalidConfig, "amplification needs kappa > 1/2");
  return std::cosh(2.0 * r) + std::sinh(2.0 * r) * std::cos(alpha) / (4.0 * kappa * kappa - 1.0);
}

double effective_R(double temperature, const SqueezeSpec& spec, const AnalyticContext& ctx,
                   GrowthMode mode) {
  return bath_R(temperature, ctx, mode) * amplification(spec.r, spec.alpha, ctx.derived.kappa);
}

double delta_z_squeezed(double t1, double t2, const SqueezeSpec& spec, const AnalyticContext& ctx,
                        GrowthMode mode) {
  return 2.0 * ctx.shift_per_R *
         (effective_R(t2, spec, ctx, mode) - effective_R(t1, spec, ctx, mode));
}

double squeeze_quantum_threshold(double n_th) {
  if (!(n_th >= 0.0)) throw Error(ErrorKind::InvalidConfig, "n_th must be >= 0");
  return 0.5 * std::log(2.0 * (2.0 * n_th + 1.0));
}

double pulse_attenuation(double pulse_fraction) {
  const double x = 0.5 * std::numbers::pi * pulse_fraction;
  return x == 0.0 ? 1.0 : std::sin(x) / x;
}

}  // namespace iontherm
