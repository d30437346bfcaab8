// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "gpe/blocktri.hpp"

namespace gpe {

enum class PotentialKind { harmonic, harmonic_lattice, custom_table };

/// Trapping potential on the unit cube. harmonic is sum of squared
/// coordinates; harmonic_lattice adds the optical-lattice term
/// 50*sum sin^2(pi x_d / 4) on top of half the harmonic one; custom_table
/// carries one value per grid point and cannot be evaluated pointwise.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::harmonic;
  std::vector<double> table;

  static PotentialSpec harmonic() { return {PotentialKind::harmonic, {}}; }
  static PotentialSpec harmonic_lattice() { return {PotentialKind::harmonic_lattice, {}}; }
  static PotentialSpec custom_table(std::vector<double> values) {
    return {PotentialKind::custom_table, std::move(values)};
  }
};

/// Evaluates the potential at a point strictly inside (0,1)^d.
/// custom_table specs are positional and reject this call.
double eval_potential(const PotentialSpec& spec, std::span<const double> point);

/// A discretized problem instance: the operator B (negative Laplacian plus
/// potential on the interior grid), the physical coupling beta, and the
/// scaled coefficient multiplying diag(u.^2)u in the discrete problem.
struct DiscreteGpe {
  int dim;
  std::vector<int> sizes;
  int n;
  BlockTridiag B;
  double beta_physical;
  double beta_scaled;
  PotentialSpec potential;
};

/// Builds the finite-difference problem on [0,1]^dim with homogeneous
/// Dirichlet boundary and interior counts `sizes` (>= 2 per direction).
/// Grid points are x_i = i*h with h = 1/(N+1); ordering is x-fastest.
/// beta_scaled = beta * prod(N_d + 1).
DiscreteGpe build_problem(int dim, std::span<const int> sizes, double beta,
                          const PotentialSpec& spec);

/// Wraps an explicit operator as a problem instance with the given scaled
/// coupling. Intended for tests and oracles on hand-built matrices.
DiscreteGpe problem_from_matrix(BlockTridiag B, double beta_scaled);

}  // namespace gpe
