#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "spdpeg/core.hpp"
#include "spdpeg/rng.hpp"

namespace testing {

using spdpeg::Dataset;
using spdpeg::Sample;
using spdpeg::Vector;

/// Dataset from dense rows; zero entries are not stored.
inline Dataset dense_dataset(const std::vector<Vector>& rows, const Vector& labels)
{
  Dataset d;
  d.dimension = rows.empty() ? 0 : rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Sample s;
    s.label = labels[i];
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      if (rows[i][j] != 0.0) s.features.emplace_back(static_cast<std::uint32_t>(j), rows[i][j]);
    d.samples.push_back(std::move(s));
  }
  return d;
}

inline Dataset random_dataset(std::size_t n, std::size_t d, spdpeg::RandomState& rng, double density = 1.0)
{
  std::vector<Vector> rows(n, Vector(d, 0.0));
  Vector labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : rows[i])
      if (rng.uniform() < density) v = rng.normal();
    labels[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return dense_dataset(rows, labels);
}

inline Vector random_vector(std::size_t n, spdpeg::RandomState& rng, double scale = 1.0)
{
  Vector v(n);
  for (auto& e : v) e = scale * rng.normal();
  return v;
}

inline double max_abs_diff(const Vector& a, const Vector& b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace testing
