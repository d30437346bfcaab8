// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gpe/blocktri.hpp"
#include "gpe/grid.hpp"

namespace gpe::oracle {

/// Explicitly assembled dense matrix. Reference-grade code paths only:
/// used by tests to cross-check the structured kernels.
class DenseMatrix {
public:
  explicit DenseMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}
  static DenseMatrix from_blocktri(const BlockTridiag& M);

  int dim() const { return n_; }
  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<double>& data() const { return a_; }

  std::vector<double> matvec(std::span<const double> x) const;
  /// Dense LU solve (partial pivoting). Throws on singular input.
  std::vector<double> solve(std::span<const double> b) const;
  bool is_symmetric(double tol = 1e-10) const;

private:
  int n_;
  std::vector<double> a_;
};

/// Smallest eigenvalue and its sign-normalized-positive eigenvector of a
/// symmetric matrix, via cyclic Jacobi rotations driven to off-diagonal
/// norm <= 1e-12 relative to the matrix scale.
std::pair<double, std::vector<double>> dense_smallest_eig(const DenseMatrix& B);

/// Ground state of an n=2 instance by golden-section search over
/// u = (cos t, sin t), t in (0, pi/2), minimizing the discrete energy.
/// Returns (lambda, u) with lambda from the Rayleigh identity.
std::pair<double, std::vector<double>> brute_force_ground_state_2(const DiscreteGpe& p);

/// Normalized-gradient cross-check: u <- |u - step*(A(u)u - (u'A(u)u)u)|
/// renormalized, stopping when the eigenvalue residual drops below tol.
/// A deliberately simple checker; errors out if the energy keeps rising
/// for 100 consecutive steps (step too large).
std::pair<double, std::vector<double>> projected_gradient_ground_state(const DiscreteGpe& p,
                                                                       double step, int max_iter,
                                                                       double tol,
                                                                       int* iterations_out = nullptr);

/// Step heuristic for the projected gradient: inverse of a Gershgorin-style
/// upper bound on the linearized operator at the flat start.
double default_gradient_step(const DiscreteGpe& p);

}  // namespace gpe::oracle
