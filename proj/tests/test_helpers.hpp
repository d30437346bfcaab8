// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "gpe/blocktri.hpp"
#include "gpe/grid.hpp"

namespace gpe::testing {

/// Random symmetric block tridiagonal matrix; when `spd`, the diagonal is
/// boosted past the Gershgorin row sums.
inline BlockTridiag random_sym_blocktri(std::mt19937& rng, int m, int p, bool spd) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const std::size_t pp = static_cast<std::size_t>(p) * p;
  std::vector<double> diag(m * pp), off((m - 1) * pp);
  for (int i = 0; i < m; ++i)
    for (int r = 0; r < p; ++r)
      for (int c = r; c < p; ++c) {
        const double v = uni(rng);
        diag[i * pp + r * p + c] = v;
        diag[i * pp + c * p + r] = v;
      }
  for (double& v : off) v = uni(rng);
  if (spd) {
    // strict diagonal dominance over the whole row (diag block + couplings)
    const double boost = 2.0 * p + 1.0;
    for (int i = 0; i < m; ++i)
      for (int r = 0; r < p; ++r) diag[i * pp + r * p + r] += boost;
  }
  return BlockTridiag(m, p, std::move(diag), std::move(off));
}

/// n=2 instance with B = [[b00, b01], [b01, b11]].
inline DiscreteGpe two_site(double b00, double b01, double b11, double beta_scaled) {
  return problem_from_matrix(BlockTridiag(2, 1, {b00, b11}, {b01}), beta_scaled);
}

/// Random irreducible symmetric M-matrix (nonpositive couplings, strictly
/// dominant positive diagonal), the class the grid assembly produces.
inline BlockTridiag random_mmatrix_blocktri(std::mt19937& rng, int m, int p) {
  std::uniform_real_distribution<double> mag(0.05, 1.0);
  const std::size_t pp = static_cast<std::size_t>(p) * p;
  std::vector<double> diag(m * pp, 0.0), off((m - 1) * pp);
  for (int i = 0; i < m; ++i)
    for (int r = 0; r < p; ++r)
      for (int c = r + 1; c < p; ++c) {
        const double v = -mag(rng);
        diag[i * pp + r * p + c] = v;
        diag[i * pp + c * p + r] = v;
      }
  for (double& v : off) v = -mag(rng);
  const double boost = 2.0 * p + 1.0;
  for (int i = 0; i < m; ++i)
    for (int r = 0; r < p; ++r) diag[i * pp + r * p + r] = boost + mag(rng);
  return BlockTridiag(m, p, std::move(diag), std::move(off), true);
}

}  // namespace gpe::testing
