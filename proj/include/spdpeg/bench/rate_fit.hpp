#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace spdpeg::bench {

/// Least-squares line through (log t, log gap).
struct RateFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<std::uint64_t, std::uint64_t> window{0, 0};
  std::size_t points = 0;
};

/// Fits over iterations in [lo, hi]. Points are thinned to at most
/// `per_decade` per decade of t so the dense tail does not dominate. The
/// window is cut at the first non-positive gap; throws InputError when fewer
/// than 3 points remain.
RateFit fit_rate(std::span<const std::uint64_t> iterations,
                 std::span<const double> gaps,
                 std::uint64_t lo,
                 std::uint64_t hi,
                 std::size_t per_decade = 20);

} // namespace spdpeg::bench
