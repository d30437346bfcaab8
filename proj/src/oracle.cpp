// SPDX-License-Identifier: Apache-2.0
#include "gpe/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gpe/dense.hpp"
#include "gpe/nepv.hpp"

namespace gpe::oracle {

DenseMatrix DenseMatrix::from_blocktri(const BlockTridiag& M) {
  const int m = M.block_count();
  const int p = M.block_size();
  DenseMatrix out(M.dim());
  for (int i = 0; i < m; ++i) {
    const double* blk = M.diag_block(i);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) out.at(i * p + r, i * p + c) = blk[r * p + c];
  }
  for (int i = 0; i + 1 < m; ++i) {
    const double* blk = M.off_block(i);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) {
        out.at((i + 1) * p + r, i * p + c) = blk[r * p + c];
        out.at(i * p + c, (i + 1) * p + r) = blk[r * p + c];
      }
  }
  return out;
}

std::vector<double> DenseMatrix::matvec(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("DenseMatrix::matvec: dimension mismatch");
  std::vector<double> y(n_, 0.0);
  dense::matvec_add(a_.data(), n_, x.data(), y.data());
  return y;
}

std::vector<double> DenseMatrix::solve(std::span<const double> b) const {
  if (static_cast<int>(b.size()) != n_)
    throw std::invalid_argument("DenseMatrix::solve: dimension mismatch");
  std::vector<double> lu = a_;
  std::vector<int> piv(n_);
  if (dense::lu_factor(lu.data(), piv.data(), n_) >= 0)
    throw std::runtime_error("DenseMatrix::solve: singular matrix");
  std::vector<double> x(b.begin(), b.end());
  dense::lu_solve(lu.data(), piv.data(), n_, x.data());
  return x;
}

bool DenseMatrix::is_symmetric(double tol) const {
  double scale = 0.0;
  for (double v : a_) scale = std::max(scale, std::fabs(v));
  const double bound = tol * std::max(1.0, scale);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (std::fabs(at(i, j) - at(j, i)) > bound) return false;
  return true;
}

std::pair<double, std::vector<double>> dense_smallest_eig(const DenseMatrix& B) {
  if (!B.is_symmetric()) throw std::invalid_argument("dense_smallest_eig: matrix not symmetric");
  const int n = B.dim();
  std::vector<double> a = B.data();
  std::vector<double> evec(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) evec[static_cast<std::size_t>(i) * n + i] = 1.0;

  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::fabs(v));
  const double target = 1e-12 * std::max(1.0, scale);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = evec[k * n + p];
          const double vkq = evec[k * n + q];
          evec[k * n + p] = c * vkp - s * vkq;
          evec[k * n + q] = s * vkp + c * vkq;
        }
      }
  }

  int best = 0;
  for (int i = 1; i < n; ++i)
    if (a[i * n + i] < a[best * n + best]) best = i;
  std::vector<double> v(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = evec[static_cast<std::size_t>(i) * n + best];
    sum += v[i];
  }
  if (sum < 0.0)
    for (double& x : v) x = -x;
  const double nv = dense::norm2(v);
  for (double& x : v) x /= nv;
  return {a[best * n + best], std::move(v)};
}

std::pair<double, std::vector<double>> brute_force_ground_state_2(const DiscreteGpe& p) {
  if (p.n != 2) throw std::invalid_argument("brute_force_ground_state_2: requires n = 2");
  if (!(p.beta_scaled > 0.0))
    throw std::invalid_argument("brute_force_ground_state_2: requires beta_scaled > 0");

  auto energy_at = [&](double theta) {
    const std::vector<double> u{std::cos(theta), std::sin(theta)};
    return energy(p, u);
  };

  // golden-section search on (0, pi/2)
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1e-12, hi = std::numbers::pi / 2.0 - 1e-12;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = energy_at(x1), f2 = energy_at(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = energy_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = energy_at(x2);
    }
  }
  const double theta = 0.5 * (lo + hi);
  std::vector<double> u{std::cos(theta), std::sin(theta)};
  const std::vector<double> Au = apply_A(p, u);
  return {dense::dot(u, Au), std::move(u)};
}

double default_gradient_step(const DiscreteGpe& p) {
  // Gershgorin bound on B plus the cubic term at the flat unit start.
  const int m = p.B.block_count();
  const int pp = p.B.block_size();
  double bound = 0.0;
  for (int i = 0; i < m; ++i) {
    const double* blk = p.B.diag_block(i);
    for (int r = 0; r < pp; ++r) {
      double row = 0.0;
      for (int c = 0; c < pp; ++c) row += std::fabs(blk[r * pp + c]);
      if (i > 0) {
        const double* off = p.B.off_block(i - 1);
        for (int c = 0; c < pp; ++c) row += std::fabs(off[r * pp + c]);
      }
      if (i + 1 < m) {
        const double* off = p.B.off_block(i);
        for (int c = 0; c < pp; ++c) row += std::fabs(off[c * pp + r]);
      }
      bound = std::max(bound, row);
    }
  }
  bound += 3.0 * p.beta_scaled / p.n;
  return 0.9 / bound;
}

std::pair<double, std::vector<double>> projected_gradient_ground_state(const DiscreteGpe& p,
                                                                       double step, int max_iter,
                                                                       double tol,
                                                                       int* iterations_out) {
  if (!(step > 0.0)) throw std::invalid_argument("projected_gradient_ground_state: step must be positive");
  std::vector<double> u(p.n, 1.0 / std::sqrt(static_cast<double>(p.n)));
  double lambda = 0.0;
  // divergence guard: the energy must not rise across a 100-step window
  std::vector<double> window(100, 0.0);
  window[0] = energy(p, u);
  for (int it = 0; it < max_iter; ++it) {
    if (iterations_out) *iterations_out = it;
    const std::vector<double> Au = apply_A(p, u);
    lambda = dense::dot(u, Au);
    double rn2 = 0.0;
    std::vector<double> v(p.n);
    for (int i = 0; i < p.n; ++i) {
      const double g = Au[i] - lambda * u[i];
      rn2 += g * g;
      v[i] = u[i] - step * g;
    }
    if (std::sqrt(rn2) <= tol) return {lambda, std::move(u)};
    for (double& x : v) x = std::fabs(x);  // fold onto the positive cone
    const double nv = dense::norm2(v);
    if (nv == 0.0) throw std::runtime_error("projected_gradient_ground_state: iterate vanished");
    for (int i = 0; i < p.n; ++i) u[i] = v[i] / nv;
    const double e = energy(p, u);
    if (it >= 99) {
      const double e_old = window[(it + 1) % 100];
      if (e > e_old + 1e-12 * (1.0 + std::fabs(e_old)))
        throw std::runtime_error(
            "projected_gradient_ground_state: energy rising over 100 steps; reduce step");
    }
    window[(it + 1) % 100] = e;
  }
  if (iterations_out) *iterations_out = max_iter;
  return {lambda, std::move(u)};
}

}  // namespace gpe::oracle
