#pragma once

#include <Eigen/Dense>

#include "iontherm/core_params.hpp"

namespace iontherm {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

struct LadderOperators {
  RealMatrix annihilation;
  RealMatrix creation;
  RealMatrix number;
};

/// Bosonic operators truncated to `dim` number states. Throws InvalidDimension for dim < 2.
LadderOperators ladder_matrices(int dim);

/// Bose occupation 1 / (exp(hbar omega / k T) - 1); zero at T = 0.
double thermal_occupation(double temperature, double omega);

/// Squeeze parameter xi = r exp(i alpha).
struct SqueezeSpec {
  double r = 0.0;
  double alpha = 0.0;
};

/// Density operator of the x-radial mode in the number basis of the bare omega_x0 oscillator.
class RadialState {
 public:
  /// Takes ownership of a square matrix of size >= 2. Physical validity is not checked here;
  /// use check_invariants.
  explicit RadialState(ComplexMatrix rho);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const ComplexMatrix& rho() const { return rho_; }

 private:
  ComplexMatrix rho_;
};

struct InvariantReport {
  double hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;     // only filled when PSD checking was requested
  double top_population = 0.0;     // population in the top 10% of levels
  bool psd_checked = false;

  bool hermitian() const { return hermiticity_error < 1e-10; }
  bool unit_trace() const { return trace_error < 1e-9; }
  bool positive() const { return !psd_checked || min_eigenvalue > -1e-10; }
  bool under_resolved() const { return top_population >= 1e-6; }
  bool ok() const { return hermitian() && unit_trace() && positive() && !under_resolved(); }
};

InvariantReport check_invariants(const RadialState& state, bool check_psd = true);

/// Population in the top 10% (at least one) of the levels.
double top_level_population(const RadialState& state);

/// Geometric-population Gibbs state. Throws TruncationTooSmall when the weight beyond `dim`
/// exceeds 1e-8.
RadialState thermal_state(double n_th, int dim);

/// S rho S^dagger with S = exp((xi* a^2 - xi a^dagger^2) / 2) exponentiated on the truncated
/// space. Throws TruncationTooSmall when the result populates the top levels.
RadialState squeeze(const RadialState& state, const SqueezeSpec& spec);

/// Second moments X = <a^dag^2 + a^2>, Y = i<a^dag^2 - a^2>, N = <a^dag a>.
struct GaussianMoments {
  double X = 0.0;
  double Y = 0.0;
  double N = 0.0;

  /// R = <(a^dag + a)^2> = X + 2N + 1.
  double R() const { return X + 2.0 * N + 1.0; }
  /// (2N+1)^2 - X^2 - Y^2, >= 1 for physical Gaussian states and invariant under the dynamics.
  double uncertainty_product() const { return (2.0 * N + 1.0) * (2.0 * N + 1.0) - X * X - Y * Y; }
};

GaussianMoments moments(const RadialState& state);

/// Moments of S(xi) rho_th S(xi)^dagger in closed form (untruncated).
GaussianMoments squeezed_thermal_moments(double n_th, const SqueezeSpec& spec);

/// Tr(rho H_radial(z)) = hbar omega_x0 (<N> + 1/2) + g(z) R.
double radial_energy(const RadialState& state, double z, const TrapConfig& cfg);
double radial_energy(const GaussianMoments& m, double z, const TrapConfig& cfg);

/// Smallest Fock dimension (>= 32, multiple of 8) for which a squeezed thermal state has
/// a number-distribution tail below 1e-8.
int auto_dimension(double n_th, double r = 0.0);

}  // namespace iontherm
