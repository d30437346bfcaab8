// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

namespace gpe::dense {

// Small dense kernels for the per-block work inside the block tridiagonal
// routines. Matrices are row-major p x p. Loops are arranged so the inner
// index walks rows contiguously; zero multipliers are skipped, which keeps
// banded blocks cheap without changing the computed values.

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double dot_n(const double* x, const double* y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

/// y += A x
inline void matvec_add(const double* a, int p, const double* x, double* y) {
  for (int r = 0; r < p; ++r)
    y[r] += dot_n(a + static_cast<std::size_t>(r) * p, x, p);
}

/// y -= A x
inline void matvec_sub(const double* a, int p, const double* x, double* y) {
  for (int r = 0; r < p; ++r)
    y[r] -= dot_n(a + static_cast<std::size_t>(r) * p, x, p);
}

/// y += A^T x
inline void matvec_transpose_add(const double* a, int p, const double* x, double* y) {
  for (int r = 0; r < p; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const double* row = a + static_cast<std::size_t>(r) * p;
    for (int c = 0; c < p; ++c) y[c] += row[c] * xr;
  }
}

/// y -= A^T x
inline void matvec_transpose_sub(const double* a, int p, const double* x, double* y) {
  for (int r = 0; r < p; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const double* row = a + static_cast<std::size_t>(r) * p;
    for (int c = 0; c < p; ++c) y[c] -= row[c] * xr;
  }
}

/// In-place LU with partial pivoting. piv[k] records the row swapped into
/// position k. Returns the index of the first zero pivot, -1 on success.
inline int lu_factor(double* a, int* piv, int p) {
  for (int k = 0; k < p; ++k) {
    int pr = k;
    double amax = std::fabs(a[static_cast<std::size_t>(k) * p + k]);
    for (int i = k + 1; i < p; ++i) {
      const double v = std::fabs(a[static_cast<std::size_t>(i) * p + k]);
      if (v > amax) {
        amax = v;
        pr = i;
      }
    }
    piv[k] = pr;
    if (amax == 0.0) return k;
    if (pr != k) {
      double* rk = a + static_cast<std::size_t>(k) * p;
      double* rp = a + static_cast<std::size_t>(pr) * p;
      for (int j = 0; j < p; ++j) std::swap(rk[j], rp[j]);
    }
    const double* rk = a + static_cast<std::size_t>(k) * p;
    const double pivval = rk[k];
    for (int i = k + 1; i < p; ++i) {
      double* ri = a + static_cast<std::size_t>(i) * p;
      const double lik = ri[k] / pivval;
      ri[k] = lik;
      if (lik == 0.0) continue;
      for (int j = k + 1; j < p; ++j) ri[j] -= lik * rk[j];
    }
  }
  return -1;
}

/// b := A^{-1} b given the packed factorization from lu_factor.
inline void lu_solve(const double* a, const int* piv, int p, double* b) {
  for (int k = 0; k < p; ++k)
    if (piv[k] != k) std::swap(b[k], b[piv[k]]);
  // L y = Pb, unit lower triangle stored below the diagonal
  for (int r = 1; r < p; ++r)
    b[r] -= dot_n(a + static_cast<std::size_t>(r) * p, b, r);
  // U x = y
  for (int r = p - 1; r >= 0; --r) {
    const double* row = a + static_cast<std::size_t>(r) * p;
    double s = b[r];
    for (int c = r + 1; c < p; ++c) s -= row[c] * b[c];
    b[r] = s / row[r];
  }
}

/// b := A^{-T} b. Used to build the lower blocks of the block LU, where the
/// right-hand sides are rows of the coupling block and often start with a
/// run of zeros that the skips below exploit.
inline void lu_solve_transposed(const double* a, const int* piv, int p, double* b) {
  // U^T y = b (saxpy form walks rows of U contiguously)
  for (int r = 0; r < p; ++r) {
    const double* row = a + static_cast<std::size_t>(r) * p;
    const double yr = b[r] / row[r];
    b[r] = yr;
    if (yr == 0.0) continue;
    for (int c = r + 1; c < p; ++c) b[c] -= row[c] * yr;
  }
  // L^T z = y, unit diagonal
  for (int r = p - 1; r >= 0; --r) {
    const double zr = b[r];
    if (zr == 0.0) continue;
    const double* row = a + static_cast<std::size_t>(r) * p;
    for (int c = 0; c < r; ++c) b[c] -= row[c] * zr;
  }
  // x = P^T z: undo the swaps in reverse order
  for (int k = p - 1; k >= 0; --k)
    if (piv[k] != k) std::swap(b[k], b[piv[k]]);
}

}  // namespace gpe::dense
