// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gpe/nepv.hpp"

namespace gpe {

struct SolverOptions {
  double tol_outer = 1e-7;    ///< bisection stop on | ||u|| - 1 |
  double tol_inner = 1e-10;   ///< Newton metric (||du|| + ||r||) / ||u||
  int max_outer = 100;
  int max_inner = 100;
  bool inexact = false;       ///< solve the bordered system by BiCGSTAB
  double bicgstab_tol = 1e-6;
  int bicgstab_maxit = 200;
  int max_halvings = 50;
  bool warm_start = true;     ///< reuse the previous bisection iterate
  /// When set, the bisection start vector is alpha_init * (positive
  /// eigenvector of B) instead of the supplied u0.
  std::optional<double> alpha_init;
  /// Keep every accepted outer iterate in SolveResult::iterates.
  bool record_iterates = false;
};

enum class SolveStatus { converged, max_iterations, line_search_failed, singular_system };

const char* to_string(SolveStatus s);

struct IterationRecord {
  double lambda;          ///< lambda after this outer iteration
  double residual_norm;   ///< ||A(u)u - lambda u|| at this iterate
  double step_or_inner;   ///< step size theta (Newton-Noda) or inner Newton count (bisection)
  double norm_u;
  double min_u;
  int violations;         ///< positivity violations inside this step's inner solve
};

struct SolveResult {
  Eigenpair pair;         ///< bisection: unnormalized (u_k, lambda_k); Newton-Noda: unit iterate
  Eigenpair normalized;   ///< u/||u|| with its Rayleigh quotient
  double residual_norm = 0.0;
  int outer_iterations = 0;
  std::vector<IterationRecord> history;
  SolveStatus status = SolveStatus::max_iterations;
  std::vector<std::vector<double>> iterates;  ///< filled when record_iterates
};

struct EigResult {
  double mu;                   ///< smallest eigenvalue of B
  std::vector<double> p_vec;   ///< positive unit eigenvector
};

/// Thrown when the bordered Newton system degenerates (u^T J^{-1} u ~ 0).
class BorderedSingularError : public std::runtime_error {
public:
  BorderedSingularError() : std::runtime_error("bordered system singular") {}
};

/// Smallest eigenpair of a symmetric positive definite M-matrix by inverse
/// power iteration on one block LU factorization; stops when
/// ||Bv - theta v|| <= 1e-10 * theta.
EigResult smallest_eigenpair(const BlockTridiag& B);

struct BorderedSolution {
  std::vector<double> delta_u;
  double delta_lambda;
};

/// Solves [[J, -u], [-u^T, 0]] [du; dl] = -[r; s] by Schur elimination:
/// one factorization of J, two solves.
BorderedSolution solve_bordered(const BlockTridiag& J, std::span<const double> u,
                                std::span<const double> r, double s);

/// Newton iteration with the Noda eigenvalue update and positivity line
/// search. u0 must be strictly positive; it is normalized internally.
SolveResult nni(const DiscreteGpe& p, std::vector<double> u0, const SolverOptions& opts);

struct InnerNewtonResult {
  std::vector<double> u;
  int iterations = 0;
  /// residual_history[l] = ||A(u^l)u^l - lambda u^l||, l = 0 .. iterations.
  std::vector<double> residual_history;
  int positivity_violations = 0;
};

/// One Newton step on the unconstrained problem at fixed lambda:
/// solves [3 beta diag(u.^2) + B - lambda I] u⁺ = 2 beta u.^3.
std::vector<double> inner_newton_step(const DiscreteGpe& p, double lambda,
                                      std::span<const double> u);

/// Newton iteration for the unconstrained problem at fixed lambda > mu.
/// Transient nonpositive iterates are tolerated for up to 3 consecutive
/// steps; a collapsing iterate (||u|| < 1e-8) signals lambda <= mu.
InnerNewtonResult inner_newton(const DiscreteGpe& p, double lambda, std::vector<double> u0,
                               double tol, int max_iter);

/// Scaling for the theoretically safe Newton start alpha * p_vec at a given
/// lambda: sqrt((lambda - mu) / (beta_scaled * min(p_vec)^2)) * 1.1.
double condition8_alpha(double mu, std::span<const double> p_vec, double beta_scaled,
                        double lambda);

/// Bracket [a, b] with ||u(a)|| < 1 < ||u(b)||: a = mu + 1e-3, b = 2a,
/// doubling b until the unconstrained solution exceeds unit norm.
std::pair<double, double> find_initial_interval(const DiscreteGpe& p);

/// Bisection on lambda with an inner Newton solve per midpoint; stops when
/// | ||u_k|| - 1 | < tol_outer. Requires lambda_min(B) < a < b and u0 > 0.
SolveResult nbi(const DiscreteGpe& p, double a, double b, std::vector<double> u0,
                const SolverOptions& opts);

}  // namespace gpe
