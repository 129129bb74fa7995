#pragma once

#include <span>

#include "spdpeg/core.hpp"

namespace spdpeg {

/// Soft threshold: sign(v_i) max(|v_i| - threshold, 0).
Vector prox_l1(std::span<const double> v, double threshold);

/// argmin_y (weight/2)|y|^2 + |y - v|^2 / (2 step)  =  v / (1 + step weight).
Vector prox_squared_l2(std::span<const double> v, double weight, double step);

/// prox of step * spec.weight * r(.) at v.
Vector apply_prox(const ProxSpec& spec, std::span<const double> v, double step);

/// In-place variant used on the solver hot path.
void apply_prox_inplace(const ProxSpec& spec, std::span<double> v, double step);

/// spec.weight * r(v).
double regularizer_value(const ProxSpec& spec, std::span<const double> v);

/// Euclidean projection onto the centred ball of the given radius, in place.
void project_ball(std::span<double> v, double radius);

} // namespace spdpeg
