#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "spdpeg/common.hpp"

namespace spdpeg {

/// Row-compressed sparse real matrix. Immutable once built.
class SparseMatrix
{
public:
  struct Triplet
  {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;

  /// Takes ownership of CSR arrays. Throws InputError when the arrays do not
  /// describe a valid matrix (offsets, column bounds, strictly increasing
  /// columns within a row).
  SparseMatrix(std::size_t n_rows,
               std::size_t n_cols,
               std::vector<std::size_t> row_offsets,
               std::vector<std::uint32_t> col_indices,
               std::vector<double> values);

  /// Triplets may come in any order; duplicates are rejected.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix zero(std::size_t n_rows, std::size_t n_cols);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::uint32_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Stored entry or 0.
  double at(std::size_t row, std::size_t col) const;

  std::vector<Triplet> triplets() const;

  bool operator==(const SparseMatrix&) const = default;

private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::uint32_t> col_indices_;
  std::vector<double> values_;
};

/// M v. Throws InputError on length mismatch.
Vector matvec(const SparseMatrix& m, std::span<const double> v);
/// M^T v. Throws InputError on length mismatch.
Vector matvec_transpose(const SparseMatrix& m, std::span<const double> v);

/// out = M v without allocation; out must have n_rows entries.
void matvec_into(const SparseMatrix& m, std::span<const double> v, std::span<double> out);
/// out = M^T v without allocation; out must have n_cols entries.
void matvec_transpose_into(const SparseMatrix& m, std::span<const double> v, std::span<double> out);

struct PowerIterationOptions
{
  double tol = 1e-10;
  std::size_t max_iter = 10000;
};

/// Largest eigenvalue of M^T M by power iteration on M^T M, stopping when the
/// Rayleigh quotient changes by less than tol relative. Matrices without
/// stored entries return 0. The start vector is fixed (seeded), so the
/// result is deterministic. Throws ConvergenceError carrying the last
/// estimate when max_iter is reached.
double power_iteration_sigma_max(const SparseMatrix& m, PowerIterationOptions options = {});

/// Cheap upper bound |M|_1 |M|_inf >= sigma_max(M^T M).
double sigma_max_upper_bound(const SparseMatrix& m);

} // namespace spdpeg
