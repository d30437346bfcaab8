// SPDX-License-Identifier: Apache-2.0
#include "gpe/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpe/dense.hpp"

namespace gpe {

namespace {

double min_of(std::span<const double> v) {
  double lo = v[0];
  for (double x : v) lo = std::min(lo, x);
  return lo;
}

void require_positive(std::span<const double> u, const char* who) {
  for (double x : u)
    if (!(x > 0.0)) throw std::invalid_argument(std::string(who) + ": u0 must be strictly positive");
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::line_search_failed: return "line_search_failed";
    case SolveStatus::singular_system: return "singular_system";
  }
  return "unknown";
}

EigResult smallest_eigenpair(const BlockTridiag& B) {
  const int n = B.dim();
  const BlockLuFactors F = factor_block_lu(B);
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < 10000; ++it) {
    std::vector<double> w = F.solve(v);
    double sum = 0.0;
    for (double x : w) sum += x;
    if (sum < 0.0)
      for (double& x : w) x = -x;
    const double wn = dense::norm2(w);
    for (double& x : w) x /= wn;
    const std::vector<double> Bw = B.matvec(w);
    const double theta = dense::dot(w, Bw);
    double res2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = Bw[i] - theta * w[i];
      res2 += d * d;
    }
    v = std::move(w);
    // min(1, theta) keeps the bound absolute once theta exceeds 1
    if (std::sqrt(res2) <= 1e-10 * std::min(1.0, theta)) return {theta, std::move(v)};
  }
  throw std::runtime_error("smallest_eigenpair: inverse power iteration did not converge");
}

BorderedSolution solve_bordered(const BlockTridiag& J, std::span<const double> u,
                                std::span<const double> r, double s) {
  const BlockLuFactors F = factor_block_lu(J);
  std::vector<double> z1 = F.solve(u);
  std::vector<double> z2 = F.solve(r);
  const double uz1 = dense::dot(u, z1);
  if (std::fabs(uz1) < 1e-14 * dense::norm2(u) * dense::norm2(z1))
    throw BorderedSingularError();
  const double delta = (s + dense::dot(u, z2)) / uz1;
  std::vector<double> du(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) du[i] = delta * z1[i] - z2[i];
  return {std::move(du), delta};
}

SolveResult nni(const DiscreteGpe& p, std::vector<double> u0, const SolverOptions& opts) {
  require_positive(u0, "nni");
  const int n = p.n;
  {
    const double nrm = dense::norm2(u0);
    for (double& x : u0) x /= nrm;
  }

  SolveResult out;
  std::vector<double> u = std::move(u0);
  double lambda = noda_lambda(p, u);

  for (int k = 0; k < opts.max_outer; ++k) {
    const std::vector<double> r = residual(p, u, lambda);
    const double s = 0.5 * (1.0 - dense::dot(u, u));
    const BlockTridiag J = jacobian(p, u, lambda);

    std::vector<double> delta(n);
    if (!opts.inexact) {
      try {
        delta = solve_bordered(J, u, r, s).delta_u;
      } catch (const SingularBlockError&) {
        out.status = SolveStatus::singular_system;
        break;
      } catch (const BorderedSingularError&) {
        out.status = SolveStatus::singular_system;
        break;
      }
    } else {
      // BiCGSTAB on the full (n+1)-dimensional bordered operator; the step
      // is taken whether or not the inner tolerance was reached.
      std::vector<double> rhs(n + 1);
      for (int i = 0; i < n; ++i) rhs[i] = -r[i];
      rhs[n] = -s;
      const std::vector<double> uu = u;
      LinearOperator op = [&J, &uu, n](std::span<const double> x, std::span<double> y) {
        const std::vector<double> Jx = J.matvec(x.subspan(0, n));
        const double xi = x[n];
        for (int i = 0; i < n; ++i) y[i] = Jx[i] - xi * uu[i];
        y[n] = -dense::dot_n(uu.data(), x.data(), n);
      };
      std::vector<double> zero(n + 1, 0.0);
      auto [sol, st] = bicgstab(op, rhs, zero, opts.bicgstab_tol, opts.bicgstab_maxit);
      std::copy(sol.begin(), sol.begin() + n, delta.begin());
    }

    // Positivity line search: halve theta until the normalized candidate
    // is strictly positive with h = A(u)u - lambda u > 0. At convergence h
    // tends to 0 and its sign is roundoff noise, so a candidate whose
    // residual is already below the stopping tolerance is accepted as well.
    double theta = 1.0;
    std::vector<double> cand(n);
    bool accepted = false;
    for (int halvings = 0; halvings <= opts.max_halvings; ++halvings) {
      for (int i = 0; i < n; ++i) cand[i] = u[i] + theta * delta[i];
      const double wn = dense::norm2(cand);
      if (wn > 0.0) {
        for (double& x : cand) x /= wn;
        if (min_of(cand) > 0.0) {
          const std::vector<double> h = residual(p, cand, lambda);
          if (min_of(h) > 0.0 || dense::norm2(h) < opts.tol_inner) {
            accepted = true;
            break;
          }
        }
      }
      theta *= 0.5;
    }
    if (!accepted) {
      out.status = SolveStatus::line_search_failed;
      break;
    }

    const double lambda_new = noda_lambda(p, cand);
    const double metric = convergence_metric(p, u, cand, lambda_new);
    const double rn = dense::norm2(residual(p, cand, lambda_new));
    out.history.push_back({lambda_new, rn, theta, dense::norm2(cand), min_of(cand), 0});
    if (opts.record_iterates) out.iterates.push_back(cand);
    u = cand;
    lambda = lambda_new;
    ++out.outer_iterations;
    if (metric < opts.tol_inner) {
      out.status = SolveStatus::converged;
      break;
    }
  }

  out.pair = {u, lambda, true};
  out.normalized = out.pair;
  out.residual_norm = out.history.empty()
                          ? dense::norm2(residual(p, u, lambda))
                          : out.history.back().residual_norm;
  return out;
}

std::vector<double> inner_newton_step(const DiscreteGpe& p, double lambda,
                                      std::span<const double> u) {
  const BlockTridiag J = jacobian(p, u, lambda);
  std::vector<double> rhs(p.n);
  for (int i = 0; i < p.n; ++i) rhs[i] = 2.0 * p.beta_scaled * u[i] * u[i] * u[i];
  return factor_block_lu(J).solve(rhs);
}

InnerNewtonResult inner_newton(const DiscreteGpe& p, double lambda, std::vector<double> u0,
                               double tol, int max_iter) {
  if (!(p.beta_scaled > 0.0))
    throw std::invalid_argument("inner_newton: requires beta_scaled > 0");
  require_positive(u0, "inner_newton");

  InnerNewtonResult out;
  out.u = std::move(u0);
  out.residual_history.push_back(dense::norm2(residual(p, out.u, lambda)));
  int consecutive_nonpositive = 0;
  for (int l = 0; l < max_iter; ++l) {
    std::vector<double> next = inner_newton_step(p, lambda, out.u);
    ++out.iterations;
    if (min_of(next) <= 0.0) {
      ++out.positivity_violations;
      if (++consecutive_nonpositive > 3)
        throw std::runtime_error("inner_newton: positivity not recovered within 3 steps");
    } else {
      consecutive_nonpositive = 0;
    }
    const double nn = dense::norm2(next);
    if (nn < 1e-8)
      throw std::runtime_error("lambda_below_mu: no positive solution at this lambda");
    const double metric = convergence_metric(p, out.u, next, lambda);
    out.residual_history.push_back(dense::norm2(residual(p, next, lambda)));
    out.u = std::move(next);
    if (metric < tol) break;
  }
  return out;
}

double condition8_alpha(double mu, std::span<const double> p_vec, double beta_scaled,
                        double lambda) {
  if (!(beta_scaled > 0.0)) throw std::invalid_argument("condition8_alpha: beta_scaled must be positive");
  if (!(lambda > mu)) throw std::invalid_argument("condition8_alpha: lambda must exceed mu");
  const double pmin = min_of(p_vec);
  if (!(pmin > 0.0)) throw std::invalid_argument("condition8_alpha: p_vec must be positive");
  return std::sqrt((lambda - mu) / (beta_scaled * pmin * pmin)) * 1.1;
}

std::pair<double, double> find_initial_interval(const DiscreteGpe& p) {
  if (!(p.beta_scaled > 0.0))
    throw std::invalid_argument("find_initial_interval: requires beta_scaled > 0");
  const EigResult eig = smallest_eigenpair(p.B);
  const double a0 = eig.mu + 1e-3;
  double a = a0;
  double b = 2.0 * a0;
  for (int doublings = 0; doublings <= 60; ++doublings) {
    const double alpha = condition8_alpha(eig.mu, eig.p_vec, p.beta_scaled, b);
    std::vector<double> u0(p.n);
    for (int i = 0; i < p.n; ++i) u0[i] = alpha * eig.p_vec[i];
    const InnerNewtonResult res = inner_newton(p, b, std::move(u0), 1e-10, 100);
    if (dense::norm2(res.u) > 1.0) return {a, b};
    a = b;
    b = 2.0 * b;
  }
  throw std::runtime_error("find_initial_interval: more than 60 doublings; problem scaling suspect");
}

SolveResult nbi(const DiscreteGpe& p, double a, double b, std::vector<double> u0,
                const SolverOptions& opts) {
  if (!(p.beta_scaled > 0.0)) throw std::invalid_argument("nbi: requires beta_scaled > 0");
  if (!(a < b)) throw std::invalid_argument("nbi: requires a < b");
  if (opts.alpha_init) {
    const EigResult eig = smallest_eigenpair(p.B);
    u0.resize(p.n);
    for (int i = 0; i < p.n; ++i) u0[i] = *opts.alpha_init * eig.p_vec[i];
  }
  require_positive(u0, "nbi");

  SolveResult out;
  std::vector<double> u = u0;
  double lambda = 0.5 * (a + b);
  for (int k = 0; k < opts.max_outer; ++k) {
    lambda = 0.5 * (a + b);
    const std::vector<double>& start = (k == 0 || !opts.warm_start) ? u0 : u;
    InnerNewtonResult inner;
    try {
      inner = inner_newton(p, lambda, start, opts.tol_inner, opts.max_inner);
    } catch (const SingularBlockError&) {
      out.status = SolveStatus::singular_system;
      break;
    }
    u = std::move(inner.u);
    const double nu = dense::norm2(u);
    const double rn = dense::norm2(residual(p, u, lambda));
    out.history.push_back({lambda, rn, static_cast<double>(inner.iterations), nu, min_of(u),
                           inner.positivity_violations});
    if (opts.record_iterates) out.iterates.push_back(u);
    ++out.outer_iterations;
    if (std::fabs(nu - 1.0) < opts.tol_outer) {
      out.status = SolveStatus::converged;
      break;
    }
    if (nu > 1.0)
      b = lambda;
    else
      a = lambda;
  }

  out.pair = {u, lambda, false};
  const double nu = dense::norm2(u);
  Eigenpair unit;
  unit.u.resize(p.n);
  for (int i = 0; i < p.n; ++i) unit.u[i] = u[i] / nu;
  unit.lambda = dense::dot(unit.u, apply_A(p, unit.u));
  unit.positive_normalized = min_of(unit.u) > 0.0;
  out.normalized = std::move(unit);
  out.residual_norm = out.history.empty()
                          ? dense::norm2(residual(p, u, lambda))
                          : out.history.back().residual_norm;
  return out;
}

}  // namespace gpe
