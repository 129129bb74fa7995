#include "spdpeg/bench/rate_fit.hpp"

#include <cmath>
#include <vector>

#include "spdpeg/common.hpp"

namespace spdpeg::bench {

RateFit fit_rate(std::span<const std::uint64_t> iterations,
                 std::span<const double> gaps,
                 std::uint64_t lo,
                 std::uint64_t hi,
                 std::size_t per_decade)
{
  if (iterations.size() != gaps.size()) throw InputError("fit_rate: length mismatch");
  if (lo < 1 || hi < lo) throw InputError("fit_rate: bad window");
  if (per_decade < 1) throw InputError("fit_rate: per_decade must be >= 1");

  std::vector<double> xs, ys;
  double next_log = -1e300;
  double const spacing = 1.0 / static_cast<double>(per_decade);
  std::uint64_t last = lo;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    auto const t = iterations[i];
    if (t < lo) continue;
    if (t > hi) break;
    if (!(gaps[i] > 0.0) || !std::isfinite(gaps[i])) break;
    double const lt = std::log10(static_cast<double>(t));
    if (lt + 1e-12 < next_log) continue;
    xs.push_back(std::log(static_cast<double>(t)));
    ys.push_back(std::log(gaps[i]));
    next_log = lt + spacing;
    last = t;
  }
  if (xs.size() < 3) throw InputError("fit_rate: fewer than 3 usable points in window");

  double const n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("fit_rate: degenerate window");

  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.window = {lo, last};
  f.points = xs.size();
  return f;
}

} // namespace spdpeg::bench
