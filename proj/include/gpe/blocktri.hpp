// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gpe {

/// Thrown by factor_block_lu when a Schur complement block turns out
/// singular, e.g. when a spectral shift lands on an eigenvalue of the
/// shifted operator. Carries the offending block index.
class SingularBlockError : public std::runtime_error {
public:
  SingularBlockError(int block, int pivot)
      : std::runtime_error("singular Schur complement in block " + std::to_string(block) +
                           " (zero pivot at local index " + std::to_string(pivot) + ")"),
        block_index(block) {}
  int block_index;
};

/// Symmetric block tridiagonal matrix: m dense p x p diagonal blocks plus
/// m-1 sub-diagonal blocks. off_block(i) couples block-row i+1 to block-row
/// i; the matching super-diagonal block is its transpose. Immutable after
/// construction; the off-diagonal storage is shared between shifted copies.
///
/// The m_matrix flag asserts the Z-sign pattern (every off-diagonal entry
/// <= 0); it is validated on construction and survives diagonal shifts.
class BlockTridiag {
public:
  BlockTridiag(int m, int p, std::vector<double> diag_blocks,
               std::vector<double> off_blocks, bool m_matrix = false);

  static BlockTridiag identity(int m, int p);

  int block_count() const { return m_; }
  int block_size() const { return p_; }
  int dim() const { return m_ * p_; }
  bool m_matrix_flag() const { return m_matrix_; }

  const double* diag_block(int i) const {
    return diag_.data() + static_cast<std::size_t>(i) * p_ * p_;
  }
  /// Sub-diagonal block coupling block-row i+1 to block-row i, 0 <= i < m-1.
  const double* off_block(int i) const {
    return off_->data() + static_cast<std::size_t>(i) * p_ * p_;
  }
  const std::vector<double>& diag_data() const { return diag_; }
  const std::vector<double>& off_data() const { return *off_; }
  std::shared_ptr<const std::vector<double>> off_shared() const { return off_; }

  std::vector<double> matvec(std::span<const double> x) const;

  /// Returns this + diag(d) - s*I. Off-diagonal blocks are shared with the
  /// source matrix, not copied.
  BlockTridiag shift_diagonal(std::span<const double> d, double s) const;

  double max_abs() const;

private:
  BlockTridiag(int m, int p, std::vector<double> diag,
               std::shared_ptr<const std::vector<double>> off, bool m_matrix)
      : m_(m), p_(p), m_matrix_(m_matrix), diag_(std::move(diag)), off_(std::move(off)) {}

  int m_;
  int p_;
  bool m_matrix_;
  std::vector<double> diag_;
  std::shared_ptr<const std::vector<double>> off_;
};

/// Block LU factorization of a BlockTridiag without pivoting across block
/// rows (block Thomas): U_0 = D_0, L_i = C_{i-1} U_{i-1}^{-1},
/// U_i = D_i - L_i C_{i-1}^T. The Schur complement blocks U_i are stored as
/// packed partial-pivoting LU factorizations; the source off-diagonal
/// blocks are shared for the back substitution.
class BlockLuFactors {
public:
  int block_count() const { return m_; }
  int block_size() const { return p_; }
  int dim() const { return m_ * p_; }

  std::vector<double> solve(std::span<const double> b) const;
  void solve_inplace(std::span<double> b) const;

  /// Unit-lower coupling block L_i for block-row i, 1 <= i < m.
  const double* lower_block(int i) const {
    return lower_.data() + static_cast<std::size_t>(i - 1) * p_ * p_;
  }
  /// y = U_i x, reassembled from the packed per-block factorization.
  void multiply_upper(int i, std::span<const double> x, std::span<double> y) const;
  /// Diagonal entries of the per-block U factors, block-row by block-row.
  std::vector<double> pivots() const;

  friend BlockLuFactors factor_block_lu(const BlockTridiag& M, bool exploit_scalar_off);

private:
  BlockLuFactors() = default;

  int m_ = 0;
  int p_ = 0;
  std::vector<double> lower_;
  std::vector<double> ulu_;
  std::vector<int> upiv_;
  std::shared_ptr<const std::vector<double>> off_;
};

/// Factors M. Throws SingularBlockError when a Schur complement block has a
/// zero pivot. When exploit_scalar_off is set, off-diagonal blocks that are
/// exact scalar multiples of the identity take a cheaper update path that
/// produces values equal to the general one.
BlockLuFactors factor_block_lu(const BlockTridiag& M, bool exploit_scalar_off = true);

struct IterativeStatus {
  bool converged = false;
  int iterations = 0;
  double final_relative_residual = 0.0;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Unpreconditioned BiCGSTAB on a fixed linear operator. Returns the best
/// iterate seen together with its true relative residual; a breakdown
/// restarts once from the best iterate before giving up.
std::pair<std::vector<double>, IterativeStatus> bicgstab(const LinearOperator& apply,
                                                         std::span<const double> b,
                                                         std::span<const double> x0,
                                                         double tol, int maxit);

}  // namespace gpe
