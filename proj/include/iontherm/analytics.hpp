#pragma once

#include <vector>

#include "iontherm/core_params.hpp"
#include "iontherm/fock.hpp"

namespace iontherm {

/// Trap plus the quantities derived from it that the closed forms use.
struct AnalyticContext {
  TrapConfig trap;
  DerivedParams derived;
  double shift_per_R = 0.0;  // hbar omega_x0 gamma / (m omega_z^2), m

  explicit AnalyticContext(const TrapConfig& cfg);
};

enum class GrowthMode {
  Exact,  // through coth(hbar omega_x0 / 2 k T)
  HighT,  // k T >> hbar omega_x0
};

/// omega_x0 / (1 + gamma z)^2. Throws OutOfTaper when 1 + gamma z <= 0.
double radial_frequency(double z, const AnalyticContext& ctx);

/// <(a^dag + a)^2> of the thermal state at omega_x0: coth(hbar omega_x0 / 2 k T); 1 at T = 0.
double thermal_R(double temperature, const AnalyticContext& ctx);

/// Stroboscopic position at the n-th bath contact (bath 1 at even n) when every stroke lasts
/// half an axial period and the radial state is thermal.
double stroboscopic_position(int n, double z0, double t1, double t2, const AnalyticContext& ctx);
/// Same map for arbitrary bath values of R, e.g. stroke-averaged squeezed states.
double stroboscopic_position_R(int n, double z0, double r1, double r2, const AnalyticContext& ctx);
/// Positions for n = 0 .. n_max.
std::vector<double> stroboscopic_positions(int n_max, double z0, double t1, double t2,
                                           const AnalyticContext& ctx);

/// Growth z_{n+2} - z_n per engine cycle; sign follows t2 - t1.
double delta_z(double t1, double t2, const AnalyticContext& ctx, GrowthMode mode = GrowthMode::Exact);

/// Ideal protocol amplitude 2 N delta_z (Exact mode).
double protocol_amplitude(int n_cycles, double t1, double t2, const AnalyticContext& ctx);

/// cosh(2r) + sinh(2r) cos(alpha) / (4 kappa^2 - 1). Requires kappa > 1/2.
double amplification(double r, double alpha, double kappa);
inline double amplification(double r, double kappa) { return amplification(r, 0.0, kappa); }

/// Stroke-averaged R of a squeezed thermal bath state, as felt by the flywheel over one stroke.
/// Exact for integer kappa.
double effective_R(double temperature, const SqueezeSpec& spec, const AnalyticContext& ctx,
                   GrowthMode mode = GrowthMode::Exact);

/// Growth per cycle when both baths squeeze with the same `spec` right after contact.
double delta_z_squeezed(double t1, double t2, const SqueezeSpec& spec, const AnalyticContext& ctx,
                        GrowthMode mode = GrowthMode::Exact);

/// Squeeze parameter above which the squeezed thermal state has no positive P function:
/// (n_th + 1/2) e^{-2r} < 1/4.
double squeeze_quantum_threshold(double n_th);

/// Attenuation of a sinusoid at omega_z averaged over a window of pulse_fraction * tau_z.
double pulse_attenuation(double pulse_fraction);

}  // namespace iontherm
