#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "spdpeg/core.hpp"

namespace spdpeg {

struct GraphEdge
{
  std::size_t i;
  std::size_t j;
  double weight;

  bool operator==(const GraphEdge&) const = default;
};

struct GraphSpec
{
  std::vector<GraphEdge> edges;
  std::size_t dimension = 0;

  /// i < j < dimension, no duplicates, finite nonzero weights.
  void validate() const;
};

/// (d-1) x d first-difference matrix: 1 on the diagonal, -1 on the super-diagonal.
SparseMatrix build_fused_matrix(std::size_t d);

/// One row per edge (i, j, w): +w at column i, -w at column j.
SparseMatrix build_graph_matrix(const GraphSpec& spec);

/// Edges of the thresholded ridge-regularized precision matrix
/// P = (C + ridge I)^{-1}, C the empirical feature covariance. Emits
/// (i, j, |P_ij|) for |P_ij| > threshold, i < j.
GraphSpec precision_graph_from_data(const Dataset& data, double ridge = 1e-2, double threshold = 1e-3);

/// Text format: "rows cols nnz" then one "row col value" line per entry,
/// 0-based, row-major sorted. Parsing is strict; errors name the line.
SparseMatrix read_penalty_matrix(std::istream& in);
SparseMatrix read_penalty_matrix_file(const std::string& path);
void write_penalty_matrix(std::ostream& out, const SparseMatrix& m);

} // namespace spdpeg
