#pragma once

#include <string>

#include "spdpeg/solver.hpp"

namespace spdpeg {

/// Comparison methods sharing the trace schema and averaging contract of SPDPEG.
struct BaselineKind
{
  enum class Tag { EGFull, StochLinADMM };
  Tag tag = Tag::EGFull;
  double step_scale = 1.0;

  void validate() const;
};

/// SPDPEG with exact full gradients in both the predictor and the corrector.
RunResult run_eg_full(const Problem& problem,
                      const Dataset& train,
                      const Dataset& test,
                      const SolverConfig& config,
                      const RunOptions& options = {});

/// Linearized stochastic ADMM. Per iteration, with one draw xi and the SPDPEG step c:
///   x+ = prox_{c r1}(x - c (grad l(x, xi) - F^T lambda + gamma F^T (F x - z)))
///   z+ = prox_{r2/gamma}(F x+ - lambda/gamma)
///   lambda+ = lambda - gamma (F x+ - z+)
/// Output is the uniform average of (x+, z+, lambda+).
class StochLinADMM
{
public:
  StochLinADMM(const Problem& problem, const Dataset& train, SolverConfig config);

  void step();

  const SolverState& state() const noexcept { return state_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  Averages current_averages() const { return averages(state_, Regime::Convex); }
  double step_at(std::uint64_t k) const { return config_.step_scale * step_size(schedule_, k); }

private:
  const Problem& problem_;
  const Dataset& train_;
  SolverConfig config_;
  Schedule schedule_;
  SolverState state_;
  RandomState rng_;

  Vector fx_, ftv_, grad_;
  std::vector<std::size_t> idx_;
};

RunResult run_stoch_linadmm(const Problem& problem,
                            const Dataset& train,
                            const Dataset& test,
                            const SolverConfig& config,
                            const RunOptions& options = {});

/// Solver names used on the command line and in trace file names.
enum class SolverName { Spdpeg, EGFull, SLinADMM };

std::string to_string(SolverName);
SolverName parse_solver_name(const std::string&);

RunResult run_solver(SolverName name,
                     const Problem& problem,
                     const Dataset& train,
                     const Dataset& test,
                     const SolverConfig& config,
                     const RunOptions& options = {});

} // namespace spdpeg
