#pragma once

#include <cstdint>

#include "spdpeg/core.hpp"

namespace spdpeg {

/// Step-size and averaging-weight rules for the three convergence regimes.
///
///   Convex        c = 1 / (sqrt(k+1) + Lt)            alpha = 1/(t+1)
///   SCUniform     c = 2 / (mu (k+1) + 2 Lt)           alpha = 1/(t+1)
///   SCNonUniform  c = 4 / (mu (k+2) + 4 Lt)           alpha = 2(k+3) / ((t+1)(t+6))
///
/// Lt is compute_L_tilde(gamma, sigma_max, L, mu) with mu = 0 in the convex
/// regime. `horizon` is only used to normalise weights at output.
struct Schedule
{
  Regime regime = Regime::Convex;
  double mu = 0.0;
  double L_tilde = 1.0;
  std::uint64_t horizon = 0;

  /// Throws InputError when the regime/mu pairing is invalid or L_tilde <= 0.
  void validate() const;

  /// Schedule implied by a validated config and problem.
  static Schedule from_config(const SolverConfig& config, const Problem& problem);
};

double step_size(const Schedule& schedule, std::uint64_t k);

/// alpha^{k+1} for an average over iterates k = 0..t.
double average_weight(const Schedule& schedule, std::uint64_t k, std::uint64_t t);

/// Unnormalised integer weight used for online accumulation: k+3 or 1.
double raw_weight(Regime regime, std::uint64_t k);

/// Sum of raw weights over k = 0..t: (t+1)(t+6)/2 or t+1.
double raw_weight_total(Regime regime, std::uint64_t t);

} // namespace spdpeg
