// SPDX-License-Identifier: Apache-2.0
#include "gpe/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gpe {

double eval_potential(const PotentialSpec& spec, std::span<const double> point) {
  if (spec.kind == PotentialKind::custom_table)
    throw std::invalid_argument("eval_potential: custom_table values are positional");
  for (double c : point)
    if (!(c > 0.0 && c < 1.0))
      throw std::invalid_argument("eval_potential: point must lie strictly inside (0,1)^d");
  double v = 0.0;
  switch (spec.kind) {
    case PotentialKind::harmonic:
      for (double c : point) v += c * c;
      break;
    case PotentialKind::harmonic_lattice:
      for (double c : point) {
        const double s = std::sin(std::numbers::pi * c / 4.0);
        v += 0.5 * c * c + 50.0 * s * s;
      }
      break;
    case PotentialKind::custom_table:
      break;  // unreachable
  }
  return v;
}

DiscreteGpe build_problem(int dim, std::span<const int> sizes, double beta,
                          const PotentialSpec& spec) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("build_problem: dim must be 1, 2 or 3");
  if (static_cast<int>(sizes.size()) != dim)
    throw std::invalid_argument("build_problem: sizes must have one entry per dimension");
  for (int s : sizes)
    if (s < 2) throw std::invalid_argument("build_problem: each size must be >= 2");
  if (beta < 0.0) throw std::invalid_argument("build_problem: beta must be nonnegative");

  std::vector<int> N(sizes.begin(), sizes.end());
  long long n_ll = 1;
  for (int s : N) n_ll *= s;
  const int n = static_cast<int>(n_ll);

  double h[3] = {0, 0, 0};
  double inv_h2[3] = {0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    h[d] = 1.0 / (N[d] + 1);
    inv_h2[d] = 1.0 / (h[d] * h[d]);
  }

  // Potential values at interior nodes, x-fastest ordering.
  std::vector<double> V(n);
  if (spec.kind == PotentialKind::custom_table) {
    if (static_cast<int>(spec.table.size()) != n)
      throw std::invalid_argument("build_problem: custom_table length must equal n (" +
                                  std::to_string(n) + ")");
    V = spec.table;
  } else {
    const int nx = N[0];
    const int ny = dim >= 2 ? N[1] : 1;
    const int nz = dim >= 3 ? N[2] : 1;
    double point[3];
    int g = 0;
    for (int iz = 0; iz < nz; ++iz)
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
          point[0] = (ix + 1) * h[0];
          if (dim >= 2) point[1] = (iy + 1) * h[1];
          if (dim >= 3) point[2] = (iz + 1) * h[2];
          V[g++] = eval_potential(spec, std::span<const double>(point, dim));
        }
  }
  for (double v : V)
    if (!(std::isfinite(v) && v >= 0.0))
      throw std::invalid_argument("build_problem: potential values must be finite and nonnegative");

  // Block layout: 1D m=N_x,p=1; 2D m=N_y,p=N_x; 3D m=N_z,p=N_x*N_y.
  int m = 1, p = 1;
  double off_scale = 0.0;
  if (dim == 1) {
    m = N[0];
    p = 1;
    off_scale = -inv_h2[0];
  } else if (dim == 2) {
    m = N[1];
    p = N[0];
    off_scale = -inv_h2[1];
  } else {
    m = N[2];
    p = N[0] * N[1];
    off_scale = -inv_h2[2];
  }

  double center = 0.0;
  for (int d = 0; d < dim; ++d) center += 2.0 * inv_h2[d];

  const std::size_t pp = static_cast<std::size_t>(p) * p;
  std::vector<double> diag(static_cast<std::size_t>(m) * pp, 0.0);
  const int nx = N[0];
  for (int i = 0; i < m; ++i) {
    double* blk = diag.data() + static_cast<std::size_t>(i) * pp;
    for (int q = 0; q < p; ++q) {
      blk[static_cast<std::size_t>(q) * p + q] = center + V[static_cast<std::size_t>(i) * p + q];
      if (dim >= 2) {
        const int ix = q % nx;
        if (ix + 1 < nx) {
          blk[static_cast<std::size_t>(q) * p + (q + 1)] = -inv_h2[0];
          blk[static_cast<std::size_t>(q + 1) * p + q] = -inv_h2[0];
        }
        if (dim == 3 && q + nx < p) {
          blk[static_cast<std::size_t>(q) * p + (q + nx)] = -inv_h2[1];
          blk[static_cast<std::size_t>(q + nx) * p + q] = -inv_h2[1];
        }
      }
    }
  }
  std::vector<double> off(static_cast<std::size_t>(m - 1) * pp, 0.0);
  for (int i = 0; i + 1 < m; ++i)
    for (int q = 0; q < p; ++q)
      off[i * pp + static_cast<std::size_t>(q) * p + q] = off_scale;

  double scaling = 1.0;
  for (int d = 0; d < dim; ++d) scaling *= N[d] + 1;

  DiscreteGpe out{dim,
                  std::move(N),
                  n,
                  BlockTridiag(m, p, std::move(diag), std::move(off), true),
                  beta,
                  beta * scaling,
                  spec};
  return out;
}

DiscreteGpe problem_from_matrix(BlockTridiag B, double beta_scaled) {
  if (beta_scaled < 0.0)
    throw std::invalid_argument("problem_from_matrix: beta_scaled must be nonnegative");
  const int n = B.dim();
  // Present the instance as a 1D grid so beta_physical * (n+1) = beta_scaled.
  DiscreteGpe out{1,
                  {n},
                  n,
                  std::move(B),
                  beta_scaled / (n + 1),
                  beta_scaled,
                  PotentialSpec::custom_table(std::vector<double>(n, 0.0))};
  return out;
}

}  // namespace gpe
