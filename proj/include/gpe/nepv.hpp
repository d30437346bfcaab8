// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "gpe/grid.hpp"

namespace gpe {

struct Eigenpair {
  std::vector<double> u;
  double lambda = 0.0;
  /// Set by solvers whose output is a strictly positive unit vector.
  bool positive_normalized = false;
};

/// A(u)u = beta_scaled * u.^3 + B u
std::vector<double> apply_A(const DiscreteGpe& p, std::span<const double> u);

/// r(u, lambda) = A(u)u - lambda u
std::vector<double> residual(const DiscreteGpe& p, std::span<const double> u, double lambda);

/// J(u, lambda) = B + 3 beta_scaled diag(u.^2) - lambda I
BlockTridiag jacobian(const DiscreteGpe& p, std::span<const double> u, double lambda);

/// min_i (A(u)u)_i / u_i for strictly positive u. The componentwise minimum
/// is a lower bound on the eigenvalue that becomes exact at a positive
/// eigenvector; ties resolve to the first index but only the value is used.
double noda_lambda(const DiscreteGpe& p, std::span<const double> u);

/// Discrete energy diagnostic u^T B u + (beta_scaled/2) sum u_i^4
/// (no grid-volume scaling; monotone indicator only).
double energy(const DiscreteGpe& p, std::span<const double> u);

/// (||u - u_prev|| + ||A(u)u - lambda u||) / ||u||, all 2-norms.
double convergence_metric(const DiscreteGpe& p, std::span<const double> u_prev,
                          std::span<const double> u, double lambda);

}  // namespace gpe
