#include "spdpeg/schedule.hpp"

#include <cmath>

namespace spdpeg {

void Schedule::validate() const
{
  if (!(L_tilde > 0.0) || !std::isfinite(L_tilde)) throw InputError("schedule: L_tilde must be > 0");
  if (regime == Regime::Convex && mu != 0.0) throw InputError("schedule: convex regime requires mu == 0");
  if (regime != Regime::Convex && !(mu > 0.0))
    throw InputError("schedule: regime " + to_string(regime) + " requires mu > 0");
}

Schedule Schedule::from_config(const SolverConfig& config, const Problem& problem)
{
  Schedule s;
  s.regime = config.regime;
  s.mu = config.regime == Regime::Convex ? 0.0 : problem.strong_convexity_mu;
  s.L_tilde = compute_L_tilde(config.gamma, config.sigma_max_FtF, config.lipschitz_L, s.mu);
  s.horizon = config.max_iters == 0 ? 0 : config.max_iters - 1;
  s.validate();
  return s;
}

double step_size(const Schedule& schedule, std::uint64_t k)
{
  auto const kk = static_cast<double>(k);
  switch (schedule.regime) {
  case Regime::Convex: return 1.0 / (std::sqrt(kk + 1.0) + schedule.L_tilde);
  case Regime::SCUniform: return 2.0 / (schedule.mu * (kk + 1.0) + 2.0 * schedule.L_tilde);
  case Regime::SCNonUniform: return 4.0 / (schedule.mu * (kk + 2.0) + 4.0 * schedule.L_tilde);
  }
  return 0.0;
}

double raw_weight(Regime regime, std::uint64_t k)
{
  return regime == Regime::SCNonUniform ? static_cast<double>(k + 3) : 1.0;
}

double raw_weight_total(Regime regime, std::uint64_t t)
{
  if (regime == Regime::SCNonUniform) {
    // (t+1)(t+6) is always even
    std::uint64_t const total = (t + 1) * (t + 6) / 2;
    return static_cast<double>(total);
  }
  return static_cast<double>(t + 1);
}

double average_weight(const Schedule& schedule, std::uint64_t k, std::uint64_t t)
{
  if (k > t) throw InputError("average_weight: k must not exceed t");
  if (schedule.regime == Regime::SCNonUniform)
    return 2.0 * static_cast<double>(k + 3) / (static_cast<double>(t + 1) * static_cast<double>(t + 6));
  return 1.0 / static_cast<double>(t + 1);
}

} // namespace spdpeg
