#pragma once

#include <Eigen/Dense>
#include <random>

#include "iontherm/fock.hpp"

namespace testing {

/// Random mixed state: G G^dagger / Tr with complex Gaussian G, rank <= `rank`.
inline iontherm::RadialState random_state(int dim, std::mt19937_64& rng, int rank = 3) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = {normal(rng), normal(rng)};
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return iontherm::RadialState(rho);
}

/// 1/2 sum |eig(a - b)| for Hermitian a, b.
inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::MatrixXcd d = a - b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (d + d.adjoint()));
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

inline double rel(double actual, double expected) {
  return std::abs(actual - expected) / std::abs(expected);
}

}  // namespace testing
