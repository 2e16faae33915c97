#include "iontherm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "iontherm/errors.hpp"
#include "iontherm/propagator.hpp"

namespace iontherm {

namespace {

constexpr double kTailBound = 1e-8;
constexpr double kTopPopulationBound = 1e-6;

void require_dim(int dim) {
  if (dim < 2) {
    throw Error(ErrorKind::InvalidDimension,
                "Fock dimension must be at least 2, got " + std::to_string(dim));
  }
}

}  // namespace

LadderOperators ladder_matrices(int dim) {
  require_dim(dim);
  LadderOperators ops;
  ops.annihilation = RealMatrix::Zero(dim, dim);
  ops.number = RealMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) ops.annihilation(n - 1, n) = std::sqrt(static_cast<double>(n));
  for (int n = 0; n < dim; ++n) ops.number(n, n) = n;
  ops.creation = ops.annihilation.transpose();
  return ops;
}

double thermal_occupation(double temperature, double omega) {
  if (temperature <= 0.0) return 0.0;
  const double x = PhysicalConstants::hbar * omega / (PhysicalConstants::k_boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

RadialState::RadialState(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) {
    throw Error(ErrorKind::InvalidDimension, "density matrix must be square");
  }
  require_dim(static_cast<int>(rho_.rows()));
}

double top_level_population(const RadialState& state) {
  const int dim = state.dim();
  const int count = std::max(1, dim / 10);
  double pop = 0.0;
  for (int n = dim - count; n < dim; ++n) pop += state.rho()(n, n).real();
  return pop;
}

InvariantReport check_invariants(const RadialState& state, bool check_psd) {
  const auto& rho = state.rho();
  InvariantReport report;
  report.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  report.trace_error = std::abs(rho.trace() - std::complex<double>(1.0, 0.0));
  report.top_population = top_level_population(state);
  if (check_psd) {
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.psd_checked = true;
  }
  return report;
}

RadialState thermal_state(double n_th, int dim) {
  require_dim(dim);
  if (!(n_th >= 0.0) || !std::isfinite(n_th)) {
    throw Error(ErrorKind::InvalidConfig, "thermal occupation must be finite and >= 0");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  if (n_th == 0.0) {
    rho(0, 0) = 1.0;
    return RadialState(std::move(rho));
  }
  const double q = n_th / (1.0 + n_th);
  const double tail = std::pow(q, dim);
  if (tail > kTailBound) {
    throw Error(ErrorKind::TruncationTooSmall,
                "thermal state with n_th=" + std::to_string(n_th) + " needs more than " +
                    std::to_string(dim) + " levels (tail weight " + std::to_string(tail) +
                    ", suggested dim " + std::to_string(auto_dimension(n_th)) + ")");
  }
  // Renormalised over the truncation.
  const double norm = (1.0 - q) / (1.0 - tail);
  double p = norm;
  for (int n = 0; n < dim; ++n) {
    rho(n, n) = p;
    p *= q;
  }
  return RadialState(std::move(rho));
}

RadialState squeeze(const RadialState& state, const SqueezeSpec& spec) {
  if (!std::isfinite(spec.r) || spec.r < 0.0 || !std::isfinite(spec.alpha)) {
    throw Error(ErrorKind::InvalidConfig, "squeeze amplitude must be finite and >= 0");
  }
  if (spec.r == 0.0) return state;

  const int dim = state.dim();
  const std::complex<double> xi = std::polar(spec.r, spec.alpha);
  const auto ops = ladder_matrices(dim);
  const ComplexMatrix a2 = (ops.annihilation * ops.annihilation).cast<std::complex<double>>();
  const ComplexMatrix ad2 = a2.transpose();

  // S = exp(K) with K anti-Hermitian; G = iK is Hermitian so S = V exp(-i lambda) V^dagger.
  const std::complex<double> i(0.0, 1.0);
  const ComplexMatrix generator = 0.5 * i * (std::conj(xi) * a2 - xi * ad2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(generator);
  const Eigen::VectorXcd phases =
      solver.eigenvalues().unaryExpr([&](double l) { return std::exp(-i * l); });
  const ComplexMatrix S = solver.eigenvectors() * phases.asDiagonal() *
                          solver.eigenvectors().adjoint();

  ComplexMatrix out = S * state.rho() * S.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  RadialState result(std::move(out));
  const double top = top_level_population(result);
  if (top >= kTopPopulationBound) {
    throw Error(ErrorKind::TruncationTooSmall,
                "squeezed state populates the top levels (" + std::to_string(top) +
                    "); increase dim beyond " + std::to_string(dim));
  }
  return result;
}

GaussianMoments moments(const RadialState& state) {
  const auto& rho = state.rho();
  const int dim = state.dim();
  // <a^2> = sum_m rho(m, m-2) sqrt(m (m-1))
  std::complex<double> a2(0.0, 0.0);
  for (int m = 2; m < dim; ++m) {
    a2 += rho(m, m - 2) * std::sqrt(static_cast<double>(m) * (m - 1));
  }
  double n = 0.0;
  for (int m = 1; m < dim; ++m) n += m * rho(m, m).real();
  return {2.0 * a2.real(), 2.0 * a2.imag(), n};
}

GaussianMoments squeezed_thermal_moments(double n_th, const SqueezeSpec& spec) {
  const double w = 2.0 * n_th + 1.0;
  const double s = std::sinh(2.0 * spec.r);
  return {-w * s * std::cos(spec.alpha), -w * s * std::sin(spec.alpha),
          0.5 * (w * std::cosh(2.0 * spec.r) - 1.0)};
}

double radial_energy(const GaussianMoments& m, double z, const TrapConfig& cfg) {
  return PhysicalConstants::hbar * cfg.omega_x0 * (m.N + 0.5) + coupling_g(z, cfg) * m.R();
}

double radial_energy(const RadialState& state, double z, const TrapConfig& cfg) {
  return radial_energy(moments(state), z, cfg);
}

int auto_dimension(double n_th, double r) {
  constexpr int kMinimum = 32;
  const double variance = (n_th + 0.5) * std::exp(2.0 * r);
  const double ratio = (variance - 0.5) / (variance + 0.5);
  if (!(ratio > 0.0)) return kMinimum;
  const double levels = std::ceil(std::log(kTailBound) / std::log(ratio));
  int dim = std::max(kMinimum, static_cast<int>(levels));
  return (dim + 7) / 8 * 8;
}

}  // namespace iontherm
