#include "spdpeg/baselines.hpp"

#include <chrono>
#include <cmath>

#include "spdpeg/prox.hpp"
#include "spdpeg/sparse_matrix.hpp"

namespace spdpeg {

void BaselineKind::validate() const
{
  if (!(step_scale > 0.0) || !std::isfinite(step_scale))
    throw InputError("baseline step_scale must be finite and > 0");
}

RunResult run_eg_full(const Problem& problem,
                      const Dataset& train,
                      const Dataset& test,
                      const SolverConfig& config,
                      const RunOptions& options)
{
  SolverConfig c = config;
  c.full_batch = true;
  return run(problem, train, test, c, options);
}

StochLinADMM::StochLinADMM(const Problem& problem, const Dataset& train, SolverConfig config)
  : problem_(problem)
  , train_(train)
  , config_(std::move(config))
  , rng_(config_.seed)
{
  problem_.validate(train_);
  config_.validate(problem_);
  BaselineKind{BaselineKind::Tag::StochLinADMM, config_.step_scale}.validate();
  schedule_ = Schedule::from_config(config_, problem_);
  state_ = SolverState::initial(problem_);
  fx_.resize(problem_.dual_dimension());
  ftv_.resize(problem_.dimension());
  grad_.resize(problem_.dimension());
}

void StochLinADMM::step()
{
  auto& s = state_;
  std::uint64_t const k = s.k;
  double const c = step_at(k);
  double const gamma = config_.gamma;
  auto const& F = problem_.penalty;
  auto const mode = config_.full_batch ? SamplingMode::Enumerate : SamplingMode::WithReplacement;

  stochastic_gradient_into(problem_, train_, s.x, rng_, config_.batch_size, mode, grad_, idx_);

  // linearized augmented Lagrangian gradient: -lambda + gamma (F x - z)
  matvec_into(F, s.x, fx_);
  for (std::size_t i = 0; i < fx_.size(); ++i) fx_[i] = gamma * (fx_[i] - s.z[i]) - s.lambda[i];
  matvec_transpose_into(F, fx_, ftv_);
  for (std::size_t j = 0; j < s.x.size(); ++j) s.x[j] -= c * (grad_[j] + ftv_[j]);
  apply_prox_inplace(problem_.r1, s.x, c);
  if (problem_.feasible_radius) project_ball(s.x, *problem_.feasible_radius);

  s.z = update_z(s, problem_, gamma);
  matvec_into(F, s.x, fx_);
  for (std::size_t i = 0; i < s.lambda.size(); ++i) s.lambda[i] -= gamma * (fx_[i] - s.z[i]);

  for (auto const* v : {&s.x, &s.z, &s.lambda})
    for (double e : *v)
      if (!std::isfinite(e) || std::abs(e) > 1e12)
        throw DivergenceError(k, "slinadmm diverged at iteration " + std::to_string(k));

  s.x_bar = s.x;
  s.lambda_bar = s.lambda;
  for (std::size_t j = 0; j < s.x.size(); ++j) s.weighted_x_sum[j] += s.x[j];
  for (std::size_t i = 0; i < s.z.size(); ++i) s.weighted_z_sum[i] += s.z[i];
  for (std::size_t i = 0; i < s.lambda.size(); ++i) s.weighted_lambda_sum[i] += s.lambda[i];
  s.raw_weight_sum += 1.0;
  s.max_dual_norm = std::max(s.max_dual_norm, norm(s.lambda));
  s.k = k + 1;
}

RunResult run_stoch_linadmm(const Problem& problem,
                            const Dataset& train,
                            const Dataset& test,
                            const SolverConfig& config,
                            const RunOptions& options)
{
  if (config.max_iters < 1) throw InputError("run: max_iters must be >= 1");
  StochLinADMM solver(problem, train, config);
  RunResult result;
  auto const t0 = std::chrono::steady_clock::now();
  for (std::uint64_t n = 1; n <= config.max_iters; ++n) {
    solver.step();
    if (options.on_iteration) options.on_iteration(solver.state());
    if (n % config.eval_every == 0 || n == config.max_iters) {
      auto rec = evaluate_trace(problem, train, test, solver.current_averages(), n, solver.state().max_dual_norm);
      if (options.record_wall_time)
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      result.trace.push_back(rec);
    }
  }
  result.averages = solver.current_averages();
  result.final_state = solver.state();
  return result;
}

std::string to_string(SolverName s)
{
  switch (s) {
  case SolverName::Spdpeg: return "spdpeg";
  case SolverName::EGFull: return "eg-full";
  case SolverName::SLinADMM: return "slinadmm";
  }
  return "?";
}

SolverName parse_solver_name(const std::string& s)
{
  if (s == "spdpeg") return SolverName::Spdpeg;
  if (s == "eg-full") return SolverName::EGFull;
  if (s == "slinadmm") return SolverName::SLinADMM;
  throw InputError("unknown solver '" + s + "'");
}

RunResult run_solver(SolverName name,
                     const Problem& problem,
                     const Dataset& train,
                     const Dataset& test,
                     const SolverConfig& config,
                     const RunOptions& options)
{
  switch (name) {
  case SolverName::Spdpeg: return run(problem, train, test, config, options);
  case SolverName::EGFull: return run_eg_full(problem, train, test, config, options);
  case SolverName::SLinADMM: return run_stoch_linadmm(problem, train, test, config, options);
  }
  throw InputError("unknown solver");
}

} // namespace spdpeg
