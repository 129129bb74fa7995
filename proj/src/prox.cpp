#include "spdpeg/prox.hpp"

#include <cmath>

namespace spdpeg {

namespace {

inline double soft_threshold(double v, double t)
{
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

} // namespace

Vector prox_l1(std::span<const double> v, double threshold)
{
  if (!(threshold >= 0.0)) throw InputError("prox_l1: threshold must be >= 0");
  Vector out(v.begin(), v.end());
  if (threshold == 0.0) return out;
  for (auto& e : out) e = soft_threshold(e, threshold);
  return out;
}

Vector prox_squared_l2(std::span<const double> v, double weight, double step)
{
  if (!(step > 0.0)) throw InputError("prox_squared_l2: step must be > 0");
  if (!(weight >= 0.0)) throw InputError("prox_squared_l2: weight must be >= 0");
  Vector out(v.begin(), v.end());
  if (weight == 0.0) return out;
  double const scale = 1.0 / (1.0 + step * weight);
  for (auto& e : out) e *= scale;
  return out;
}

void apply_prox_inplace(const ProxSpec& spec, std::span<double> v, double step)
{
  if (!(step > 0.0)) throw InputError("apply_prox: step must be > 0");
  switch (spec.kind) {
  case RegKind::None: return;
  case RegKind::L1: {
    double const t = step * spec.weight;
    if (t == 0.0) return;
    for (auto& e : v) e = soft_threshold(e, t);
    return;
  }
  case RegKind::SquaredL2: {
    if (spec.weight == 0.0) return;
    double const scale = 1.0 / (1.0 + step * spec.weight);
    for (auto& e : v) e *= scale;
    return;
  }
  }
}

Vector apply_prox(const ProxSpec& spec, std::span<const double> v, double step)
{
  switch (spec.kind) {
  case RegKind::None:
    if (!(step > 0.0)) throw InputError("apply_prox: step must be > 0");
    return Vector(v.begin(), v.end());
  case RegKind::L1:
    if (!(step > 0.0)) throw InputError("apply_prox: step must be > 0");
    return prox_l1(v, step * spec.weight);
  case RegKind::SquaredL2: return prox_squared_l2(v, spec.weight, step);
  }
  return Vector(v.begin(), v.end());
}

double regularizer_value(const ProxSpec& spec, std::span<const double> v)
{
  switch (spec.kind) {
  case RegKind::None: return 0.0;
  case RegKind::L1: {
    double s = 0.0;
    for (double e : v) s += std::abs(e);
    return spec.weight * s;
  }
  case RegKind::SquaredL2: return 0.5 * spec.weight * dot(v, v);
  }
  return 0.0;
}

void project_ball(std::span<double> v, double radius)
{
  double const n = norm(v);
  if (n <= radius) return;
  double const scale = radius / n;
  for (auto& e : v) e *= scale;
}

} // namespace spdpeg
