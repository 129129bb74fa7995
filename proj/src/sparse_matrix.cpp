#include "spdpeg/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace spdpeg {

SparseMatrix::SparseMatrix(std::size_t n_rows,
                           std::size_t n_cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::uint32_t> col_indices,
                           std::vector<double> values)
  : n_rows_(n_rows)
  , n_cols_(n_cols)
  , row_offsets_(std::move(row_offsets))
  , col_indices_(std::move(col_indices))
  , values_(std::move(values))
{
  if (row_offsets_.size() != n_rows_ + 1) throw InputError("SparseMatrix: row_offsets must have n_rows+1 entries");
  if (row_offsets_.front() != 0) throw InputError("SparseMatrix: row_offsets must start at 0");
  if (col_indices_.size() != values_.size()) throw InputError("SparseMatrix: col_indices/values length mismatch");
  if (row_offsets_.back() != values_.size()) throw InputError("SparseMatrix: last row offset must equal nnz");
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (row_offsets_[r] > row_offsets_[r + 1]) throw InputError("SparseMatrix: row_offsets must be nondecreasing");
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      if (col_indices_[p] >= n_cols_)
        throw InputError("SparseMatrix: column index " + std::to_string(col_indices_[p]) + " out of range in row " +
                         std::to_string(r));
      if (p > row_offsets_[r] && col_indices_[p] <= col_indices_[p - 1])
        throw InputError("SparseMatrix: column indices must be strictly increasing in row " + std::to_string(r));
      if (!std::isfinite(values_[p])) throw InputError("SparseMatrix: non-finite value");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<Triplet> triplets)
{
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  std::vector<std::size_t> offsets(n_rows + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (auto const& t : triplets) {
    if (t.row >= n_rows || t.col >= n_cols) throw InputError("SparseMatrix: triplet index out of range");
    offsets[t.row + 1]++;
    cols.push_back(static_cast<std::uint32_t>(t.col));
    vals.push_back(t.value);
  }
  for (std::size_t r = 0; r < n_rows; ++r) offsets[r + 1] += offsets[r];
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n)
{
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::uint32_t> cols(n);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols[i] = static_cast<std::uint32_t>(i);
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::zero(std::size_t n_rows, std::size_t n_cols)
{
  return SparseMatrix(n_rows, n_cols, std::vector<std::size_t>(n_rows + 1, 0), {}, {});
}

double SparseMatrix::at(std::size_t row, std::size_t col) const
{
  if (row >= n_rows_ || col >= n_cols_) throw InputError("SparseMatrix::at: index out of range");
  auto const first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
  auto const last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
  auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

std::vector<SparseMatrix::Triplet> SparseMatrix::triplets() const
{
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < n_rows_; ++r)
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) out.push_back({r, col_indices_[p], values_[p]});
  return out;
}

void matvec_into(const SparseMatrix& m, std::span<const double> v, std::span<double> out)
{
  if (v.size() != m.n_cols()) throw InputError("matvec: vector length does not match matrix columns");
  if (out.size() != m.n_rows()) throw InputError("matvec: output length does not match matrix rows");
  auto const offsets = m.row_offsets();
  auto const cols = m.col_indices();
  auto const vals = m.values();
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    double s = 0.0;
    for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) s += vals[p] * v[cols[p]];
    out[r] = s;
  }
}

void matvec_transpose_into(const SparseMatrix& m, std::span<const double> v, std::span<double> out)
{
  if (v.size() != m.n_rows()) throw InputError("matvec_transpose: vector length does not match matrix rows");
  if (out.size() != m.n_cols()) throw InputError("matvec_transpose: output length does not match matrix columns");
  std::fill(out.begin(), out.end(), 0.0);
  auto const offsets = m.row_offsets();
  auto const cols = m.col_indices();
  auto const vals = m.values();
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    double const vr = v[r];
    for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) out[cols[p]] += vals[p] * vr;
  }
}

Vector matvec(const SparseMatrix& m, std::span<const double> v)
{
  Vector out(m.n_rows());
  matvec_into(m, v, out);
  return out;
}

Vector matvec_transpose(const SparseMatrix& m, std::span<const double> v)
{
  Vector out(m.n_cols());
  matvec_transpose_into(m, v, out);
  return out;
}

double power_iteration_sigma_max(const SparseMatrix& m, PowerIterationOptions options)
{
  if (!(options.tol > 0.0)) throw InputError("power_iteration_sigma_max: tol must be positive");
  if (m.n_cols() == 0) throw InputError("power_iteration_sigma_max: matrix has no columns");
  if (m.nnz() == 0) return 0.0;

  // The all-ones vector lies in the kernel of difference operators, so start
  // from a fixed positive pseudo-random vector instead.
  std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Vector v(m.n_cols());
  for (auto& e : v) e = unif(gen);
  double nv = norm(v);
  for (auto& e : v) e /= nv;

  Vector mv(m.n_rows()), w(m.n_cols());
  double estimate = 0.0;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    matvec_into(m, v, mv);
    double const rayleigh = dot(mv, mv); // v^T M^T M v with |v| = 1
    matvec_transpose_into(m, mv, w);
    double const nw = norm(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / nw;
    if (it > 0 && std::abs(rayleigh - estimate) <= options.tol * std::abs(rayleigh)) return rayleigh;
    estimate = rayleigh;
  }
  throw ConvergenceError(estimate, "power_iteration_sigma_max: no convergence within " +
                                     std::to_string(options.max_iter) + " iterations");
}

double sigma_max_upper_bound(const SparseMatrix& m)
{
  Vector col_abs(m.n_cols(), 0.0);
  double row_max = 0.0;
  auto const offsets = m.row_offsets();
  auto const cols = m.col_indices();
  auto const vals = m.values();
  for (std::size_t r = 0; r < m.n_rows(); ++r) {
    double s = 0.0;
    for (std::size_t p = offsets[r]; p < offsets[r + 1]; ++p) {
      s += std::abs(vals[p]);
      col_abs[cols[p]] += std::abs(vals[p]);
    }
    row_max = std::max(row_max, s);
  }
  double col_max = 0.0;
  for (double c : col_abs) col_max = std::max(col_max, c);
  return row_max * col_max;
}

} // namespace spdpeg
