#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "iontherm/core_params.hpp"
#include "iontherm/fock.hpp"

namespace iontherm {

/// Settings of the Newton-polynomial expansion of exp(-i L dt).
struct NewtonConfig {
  int max_order = 128;
  double coeff_tolerance = 1e-13;  // stop once |a_n| * ||v_n|| drops below this twice in a row
  double spectral_margin = 1.1;    // safety factor on the Gershgorin spectral range
};

void validate(const NewtonConfig& cfg);

/// One piecewise-constant step: H is evaluated at axial position `z` for duration `dt`.
struct PropagationStep {
  double dt = 0.0;
  double z = 0.0;
};

/// g(z) = (hbar omega_x0 / 4) ((1 + gamma z)^-4 - 1). Throws OutOfTaper when 1 + gamma z <= 0.
double coupling_g(double z, const TrapConfig& cfg);

/// H(z) = hbar omega_x0 (N + 1/2) + g(z) (X + 2N + 1) restricted to the x mode. Only the main
/// diagonal and the +-2 bands are non-zero; the matrix is real symmetric.
struct RadialHamiltonian {
  Eigen::VectorXd diagonal;  // H(n, n)
  Eigen::VectorXd band2;     // H(n, n + 2) = H(n + 2, n)

  int dim() const { return static_cast<int>(diagonal.size()); }
  RealMatrix dense() const;
  /// Gershgorin enclosure [lambda_min, lambda_max] of the spectrum.
  std::pair<double, double> spectral_bounds() const;
};

RadialHamiltonian radial_hamiltonian(int dim, double z, const TrapConfig& cfg);

struct NewtonStats {
  int order = 0;       // number of Newton terms used (largest over substeps)
  int substeps = 0;
};

/// Liouville-von Neumann propagation with a Newton interpolation of exp(-i x dt) on Leja-ordered
/// Chebyshev points spanning the commutator spectrum. The state is handled in parity blocks:
/// H couples n to n +- 2 only, so even/odd sectors never mix and empty blocks are skipped.
class NewtonPropagator {
 public:
  explicit NewtonPropagator(NewtonConfig cfg = {});

  const NewtonConfig& config() const { return cfg_; }

  /// Advances rho by dt (either sign) under the fixed Hamiltonian.
  RadialState step(const RadialState& state, const RadialHamiltonian& h, double dt,
                   NewtonStats* stats = nullptr) const;

  /// Same map for H = hbar omega_x0 (N + 1/2) + g (X + 2N + 1), computed in the frame rotating
  /// with the diagonal of H. The series then only resolves the coupling, which takes a few terms
  /// instead of roughly one per unit of omega_x0 * dim * dt. Time ordering inside the step is
  /// handled to second Magnus order; the neglected terms are O((g dt / hbar)^3).
  RadialState step_rotating(const RadialState& state, double g, double omega_x0, double dt,
                            NewtonStats* stats = nullptr) const;

  /// Divided-difference coefficients of exp(-i c y) on the stored points; exposed for tests.
  std::vector<std::complex<double>> coefficients(double c) const;
  const std::vector<double>& points() const { return points_; }

 private:
  NewtonConfig cfg_;
  std::vector<double> points_;  // Leja-ordered, in [-2, 2]
};

/// Convenience wrapper: builds H(step.z) and takes one Newton step. Requires 0 < dt <= tau_z/100.
RadialState newton_propagate(const RadialState& state, const PropagationStep& step,
                             const TrapConfig& cfg, const NewtonConfig& ncfg = {},
                             NewtonStats* stats = nullptr);

/// Exact step through the eigendecomposition of H. Reference only; dim <= 64.
RadialState dense_propagate_oracle(const RadialState& state, const PropagationStep& step,
                                   const TrapConfig& cfg);

/// Exact solution of the closed (X, Y, N) equations for constant g over dt.
GaussianMoments moments_step(const GaussianMoments& m, double g, double dt, double omega_x0);

/// Integrates the moment equations along a sampled trajectory z(t_k), t_k = k dt. Each interval
/// uses g at the interval midpoint.
GaussianMoments moments_propagate(const GaussianMoments& m, std::span<const double> z_samples,
                                  double dt, const TrapConfig& cfg);

}  // namespace iontherm
