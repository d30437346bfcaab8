// SPDX-License-Identifier: Apache-2.0
#include "gpe/blocktri.hpp"

#include <algorithm>
#include <cmath>

#include "gpe/dense.hpp"

namespace gpe {

namespace {

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(want) + ", got " + std::to_string(got));
}

// Exact test for C == c*I; returns the scalar through `c`.
bool is_scalar_identity(const double* block, int p, double& c) {
  c = block[0];
  for (int r = 0; r < p; ++r) {
    const double* row = block + static_cast<std::size_t>(r) * p;
    for (int col = 0; col < p; ++col) {
      if (r == col) {
        if (row[col] != c) return false;
      } else if (row[col] != 0.0) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

BlockTridiag::BlockTridiag(int m, int p, std::vector<double> diag_blocks,
                           std::vector<double> off_blocks, bool m_matrix)
    : m_(m), p_(p), m_matrix_(m_matrix), diag_(std::move(diag_blocks)) {
  if (m <= 0 || p <= 0) throw std::invalid_argument("BlockTridiag: m and p must be positive");
  const std::size_t pp = static_cast<std::size_t>(p) * p;
  check_length(diag_.size(), static_cast<std::size_t>(m) * pp, "diag_blocks");
  check_length(off_blocks.size(), static_cast<std::size_t>(m - 1) * pp, "off_blocks");
  off_ = std::make_shared<const std::vector<double>>(std::move(off_blocks));

  // Diagonal blocks must be symmetric (relative to the block scale).
  for (int i = 0; i < m; ++i) {
    const double* blk = diag_block(i);
    double scale = 0.0;
    for (std::size_t k = 0; k < pp; ++k) scale = std::max(scale, std::fabs(blk[k]));
    const double tol = 1e-12 * std::max(1.0, scale);
    for (int r = 0; r < p; ++r)
      for (int c = r + 1; c < p; ++c)
        if (std::fabs(blk[r * p + c] - blk[c * p + r]) > tol)
          throw std::invalid_argument("BlockTridiag: diagonal block " + std::to_string(i) +
                                      " is not symmetric");
  }
  if (m_matrix_) {
    for (int i = 0; i < m; ++i) {
      const double* blk = diag_block(i);
      for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c)
          if (r != c && blk[r * p + c] > 0.0)
            throw std::invalid_argument("BlockTridiag: positive off-diagonal entry under m_matrix flag");
    }
    for (double v : *off_)
      if (v > 0.0)
        throw std::invalid_argument("BlockTridiag: positive off-diagonal entry under m_matrix flag");
  }
}

BlockTridiag BlockTridiag::identity(int m, int p) {
  const std::size_t pp = static_cast<std::size_t>(p) * p;
  std::vector<double> diag(static_cast<std::size_t>(m) * pp, 0.0);
  for (int i = 0; i < m; ++i)
    for (int r = 0; r < p; ++r) diag[i * pp + static_cast<std::size_t>(r) * p + r] = 1.0;
  std::vector<double> off(static_cast<std::size_t>(m - 1) * pp, 0.0);
  return BlockTridiag(m, p, std::move(diag), std::move(off), true);
}

std::vector<double> BlockTridiag::matvec(std::span<const double> x) const {
  check_length(x.size(), static_cast<std::size_t>(dim()), "matvec x");
  std::vector<double> y(dim(), 0.0);
  const std::size_t pp = static_cast<std::size_t>(p_) * p_;
  const double* off = off_->data();
  for (int i = 0; i < m_; ++i) {
    double* yi = y.data() + static_cast<std::size_t>(i) * p_;
    dense::matvec_add(diag_block(i), p_, x.data() + static_cast<std::size_t>(i) * p_, yi);
    if (i > 0)
      dense::matvec_add(off + (i - 1) * pp, p_, x.data() + static_cast<std::size_t>(i - 1) * p_, yi);
    if (i + 1 < m_)
      dense::matvec_transpose_add(off + i * pp, p_, x.data() + static_cast<std::size_t>(i + 1) * p_, yi);
  }
  return y;
}

BlockTridiag BlockTridiag::shift_diagonal(std::span<const double> d, double s) const {
  check_length(d.size(), static_cast<std::size_t>(dim()), "shift_diagonal d");
  std::vector<double> diag = diag_;
  const std::size_t pp = static_cast<std::size_t>(p_) * p_;
  for (int i = 0; i < m_; ++i)
    for (int r = 0; r < p_; ++r)
      diag[i * pp + static_cast<std::size_t>(r) * p_ + r] += d[static_cast<std::size_t>(i) * p_ + r] - s;
  return BlockTridiag(m_, p_, std::move(diag), off_, m_matrix_);
}

double BlockTridiag::max_abs() const {
  double v = 0.0;
  for (double a : diag_) v = std::max(v, std::fabs(a));
  for (double a : *off_) v = std::max(v, std::fabs(a));
  return v;
}

BlockLuFactors factor_block_lu(const BlockTridiag& M, bool exploit_scalar_off) {
  const int m = M.block_count();
  const int p = M.block_size();
  const std::size_t pp = static_cast<std::size_t>(p) * p;

  BlockLuFactors F;
  F.m_ = m;
  F.p_ = p;
  F.ulu_ = M.diag_data();  // factored in place block by block
  F.upiv_.assign(static_cast<std::size_t>(m) * p, 0);
  F.lower_.assign(static_cast<std::size_t>(m - 1) * pp, 0.0);
  F.off_ = M.off_shared();

  int bad = dense::lu_factor(F.ulu_.data(), F.upiv_.data(), p);
  if (bad >= 0) throw SingularBlockError(0, bad);

  std::vector<double> rhs(p);
  const double* off = F.off_->data();
  for (int i = 1; i < m; ++i) {
    const double* C = off + (i - 1) * pp;
    double* L = F.lower_.data() + (i - 1) * pp;
    const double* Ulu = F.ulu_.data() + (i - 1) * pp;
    const int* Upiv = F.upiv_.data() + static_cast<std::size_t>(i - 1) * p;

    // Row r of L_i solves U_{i-1}^T y = (row r of C_{i-1}).
    for (int r = 0; r < p; ++r) {
      std::copy(C + static_cast<std::size_t>(r) * p, C + static_cast<std::size_t>(r + 1) * p,
                rhs.begin());
      dense::lu_solve_transposed(Ulu, Upiv, p, rhs.data());
      std::copy(rhs.begin(), rhs.end(), L + static_cast<std::size_t>(r) * p);
    }

    // U_i = D_i - L_i C_{i-1}^T
    double* U = F.ulu_.data() + i * pp;
    double c;
    if (exploit_scalar_off && is_scalar_identity(C, p, c)) {
      for (std::size_t k = 0; k < pp; ++k) U[k] -= c * L[k];
    } else {
      for (int r = 0; r < p; ++r) {
        const double* Lr = L + static_cast<std::size_t>(r) * p;
        double* Ur = U + static_cast<std::size_t>(r) * p;
        for (int col = 0; col < p; ++col)
          Ur[col] -= dense::dot_n(Lr, C + static_cast<std::size_t>(col) * p, p);
      }
    }

    bad = dense::lu_factor(U, F.upiv_.data() + static_cast<std::size_t>(i) * p, p);
    if (bad >= 0) throw SingularBlockError(i, bad);
  }
  return F;
}

void BlockLuFactors::solve_inplace(std::span<double> b) const {
  if (b.size() != static_cast<std::size_t>(dim()))
    throw std::invalid_argument("BlockLuFactors::solve: dimension mismatch");
  const std::size_t pp = static_cast<std::size_t>(p_) * p_;
  // forward sweep: y_i = b_i - L_i y_{i-1}
  for (int i = 1; i < m_; ++i)
    dense::matvec_sub(lower_block(i), p_, b.data() + static_cast<std::size_t>(i - 1) * p_,
                      b.data() + static_cast<std::size_t>(i) * p_);
  // back sweep: x_i = U_i^{-1} (y_i - C_i^T x_{i+1})
  const double* off = off_->data();
  dense::lu_solve(ulu_.data() + static_cast<std::size_t>(m_ - 1) * pp,
                  upiv_.data() + static_cast<std::size_t>(m_ - 1) * p_, p_,
                  b.data() + static_cast<std::size_t>(m_ - 1) * p_);
  for (int i = m_ - 2; i >= 0; --i) {
    dense::matvec_transpose_sub(off + static_cast<std::size_t>(i) * pp, p_,
                                b.data() + static_cast<std::size_t>(i + 1) * p_,
                                b.data() + static_cast<std::size_t>(i) * p_);
    dense::lu_solve(ulu_.data() + static_cast<std::size_t>(i) * pp,
                    upiv_.data() + static_cast<std::size_t>(i) * p_, p_,
                    b.data() + static_cast<std::size_t>(i) * p_);
  }
}

std::vector<double> BlockLuFactors::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_inplace(x);
  return x;
}

void BlockLuFactors::multiply_upper(int i, std::span<const double> x, std::span<double> y) const {
  const std::size_t pp = static_cast<std::size_t>(p_) * p_;
  const double* a = ulu_.data() + static_cast<std::size_t>(i) * pp;
  const int* piv = upiv_.data() + static_cast<std::size_t>(i) * p_;
  // U_block = P^T L_f U_f from the packed factorization
  for (int r = 0; r < p_; ++r) {
    const double* row = a + static_cast<std::size_t>(r) * p_;
    double s = 0.0;
    for (int c = r; c < p_; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  for (int r = p_ - 1; r >= 0; --r) {
    const double* row = a + static_cast<std::size_t>(r) * p_;
    double s = y[r];
    for (int c = 0; c < r; ++c) s += row[c] * y[c];
    y[r] = s;
  }
  for (int k = p_ - 1; k >= 0; --k)
    if (piv[k] != k) std::swap(y[k], y[piv[k]]);
}

std::vector<double> BlockLuFactors::pivots() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m_) * p_);
  const std::size_t pp = static_cast<std::size_t>(p_) * p_;
  for (int i = 0; i < m_; ++i)
    for (int k = 0; k < p_; ++k)
      out.push_back(ulu_[i * pp + static_cast<std::size_t>(k) * p_ + k]);
  return out;
}

std::pair<std::vector<double>, IterativeStatus> bicgstab(const LinearOperator& apply,
                                                         std::span<const double> b,
                                                         std::span<const double> x0,
                                                         double tol, int maxit) {
  if (tol <= 0.0) throw std::invalid_argument("bicgstab: tol must be positive");
  if (maxit < 1) throw std::invalid_argument("bicgstab: maxit must be >= 1");
  if (b.size() != x0.size()) throw std::invalid_argument("bicgstab: dimension mismatch");
  const std::size_t n = b.size();

  IterativeStatus status;
  std::vector<double> x(x0.begin(), x0.end());
  const double bnorm = dense::norm2(b);
  if (bnorm == 0.0) {
    status.converged = true;
    return {std::vector<double>(n, 0.0), status};
  }

  std::vector<double> r(n), rhat(n), v(n, 0.0), pvec(n, 0.0), s(n), t(n), tmp(n);
  auto true_residual = [&](const std::vector<double>& xx, std::vector<double>& out) {
    apply(xx, tmp);
    for (std::size_t i = 0; i < n; ++i) out[i] = b[i] - tmp[i];
  };

  true_residual(x, r);
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  std::vector<double> best_x = x;
  double best_rn = dense::norm2(r);
  bool restarted = false;

  auto save_best = [&](const std::vector<double>& xx, double rn) {
    if (rn < best_rn) {
      best_rn = rn;
      best_x = xx;
    }
  };

  int it = 0;
  while (it < maxit) {
    ++it;
    const double rho_new = dense::dot(rhat, r);
    bool breakdown = !std::isfinite(rho_new) || rho_new == 0.0 || omega == 0.0;
    if (!breakdown) {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) pvec[i] = r[i] + beta * (pvec[i] - omega * v[i]);
      apply(pvec, v);
      const double rhv = dense::dot(rhat, v);
      if (!std::isfinite(rhv) || rhv == 0.0) {
        breakdown = true;
      } else {
        alpha = rho_new / rhv;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        const double snorm = dense::norm2(s);
        if (snorm <= tol * bnorm) {
          for (std::size_t i = 0; i < n; ++i) x[i] += alpha * pvec[i];
          true_residual(x, r);
          save_best(x, dense::norm2(r));
          if (best_rn <= tol * bnorm) break;
          rhat = r;
          rho = 1.0;
          alpha = 1.0;
          omega = 1.0;
          std::fill(v.begin(), v.end(), 0.0);
          std::fill(pvec.begin(), pvec.end(), 0.0);
          continue;
        }
        apply(s, t);
        const double tt = dense::dot(t, t);
        if (!std::isfinite(tt) || tt == 0.0) {
          breakdown = true;
        } else {
          omega = dense::dot(t, s) / tt;
          for (std::size_t i = 0; i < n; ++i) x[i] += alpha * pvec[i] + omega * s[i];
          for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
          const double rn = dense::norm2(r);
          save_best(x, rn);
          if (!std::isfinite(rn)) {
            breakdown = true;
          } else if (rn <= tol * bnorm) {
            // guard against recurrence drift before declaring victory
            true_residual(x, r);
            const double rt = dense::norm2(r);
            save_best(x, rt);
            if (rt <= tol * bnorm) break;
          }
          rho = rho_new;
        }
      }
    }
    if (breakdown) {
      if (restarted) break;
      restarted = true;
      x = best_x;
      true_residual(x, r);
      rhat = r;
      rho = 1.0;
      alpha = 1.0;
      omega = 1.0;
      std::fill(v.begin(), v.end(), 0.0);
      std::fill(pvec.begin(), pvec.end(), 0.0);
    }
  }

  true_residual(best_x, r);
  status.iterations = it;
  status.final_relative_residual = dense::norm2(r) / bnorm;
  status.converged = status.final_relative_residual <= tol;
  return {std::move(best_x), status};
}

}  // namespace gpe
