#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minsurf/types.hpp"

namespace minsurf {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Square sparse matrix in CSR form. Every row keeps an explicit diagonal
/// entry so Jacobi scaling and constraint rows work in place.
class SparseOperator {
 public:
  SparseOperator() = default;

  /// Duplicate triplets are summed. Merge order is deterministic.
  static SparseOperator from_triplets(Index size, std::vector<Triplet> triplets);

  Index size() const { return static_cast<Index>(row_ptr_.size()) - 1; }
  std::size_t stored_entries() const { return values_.size(); }

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  double entry(Index row, Index col) const;
  std::vector<double> diagonal() const;
  double sum_entries() const;
  double frobenius_norm() const;
  double quadratic_form(std::span<const double> x) const;
  /// max_ij |A_ij - A_ji|; zero for exactly symmetric assembly.
  double symmetry_defect() const;

  SparseOperator& add_scaled(const SparseOperator& other, double factor = 1.0);

  /// Replaces row and column i by the identity for every flagged index i
  /// (zero off-diagonals, unit diagonal). Used for clamped and for fully
  /// decoupled unknowns.
  void constrain(std::span<const std::uint8_t> flagged);

  std::span<const Index> row_entries_cols(Index row) const {
    return {cols_.data() + row_ptr_[row], cols_.data() + row_ptr_[row + 1]};
  }
  std::span<const double> row_entries_values(Index row) const {
    return {values_.data() + row_ptr_[row], values_.data() + row_ptr_[row + 1]};
  }

 private:
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
};

struct PcgOutcome {
  std::vector<double> solution;
  int iterations = 0;
  bool converged = false;
  /// Euclidean residual norm after each iteration, starting with iteration 0.
  std::vector<double> residual_history;
};

/// Conjugate gradients with Jacobi (diagonal) preconditioning, zero initial
/// guess, stopping at |r| <= rel_tol * |b|. Throws on a nonpositive
/// diagonal; returns converged=false when max_iterations is exhausted or
/// the iteration breaks down.
PcgOutcome pcg_jacobi(const SparseOperator& op, std::span<const double> rhs,
                      double rel_tol, int max_iterations);

}  // namespace minsurf
