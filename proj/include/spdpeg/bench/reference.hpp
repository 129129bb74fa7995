#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spdpeg/core.hpp"

namespace spdpeg::bench {

struct ReferenceOptions
{
  double tol = 1e-10;
  std::uint64_t max_iters = 1000000;
  /// Directory for cached optima; empty disables the cache.
  std::string cache_dir;
};

struct ReferenceOptimum
{
  Vector x;
  double objective = 0.0;
  std::uint64_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Deterministic high-accuracy minimizer of l + r1 + r2(F .) on `data`, by a
/// full-gradient primal-dual splitting iteration with constant steps
///   x+ = prox_{tau r1}(x - tau (grad l(x) + F^T y))
///   y+ = prox_{s r2*}(y + s F (2 x+ - x))
/// with 1/tau - s |F|^2 >= L/2. Stops once the relative fixed-point residual
/// drops below tol. Results are cached by problem hash when cache_dir is set.
ReferenceOptimum reference_optimum(const Problem& problem, const Dataset& data, const ReferenceOptions& options = {});

/// FNV-1a over everything that determines the optimum.
std::uint64_t problem_hash(const Problem& problem, const Dataset& data);

} // namespace spdpeg::bench
