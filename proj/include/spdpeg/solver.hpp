#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spdpeg/core.hpp"
#include "spdpeg/loss.hpp"
#include "spdpeg/rng.hpp"
#include "spdpeg/schedule.hpp"
#include "spdpeg/trace.hpp"

namespace spdpeg {

/// Iterates of the stochastic primal-dual proximal extra-gradient method.
///
/// After k completed iterations: x = x^k, lambda = lambda^k, and z, x_bar,
/// lambda_bar hold z^k, xbar^k, lambdabar^k (the predictor of the last
/// iteration). The weighted sums accumulate (z, x_bar, lambda_bar) with raw
/// weight k+3 (non-uniform) or 1.
struct SolverState
{
  Vector x;
  Vector z;
  Vector lambda;
  Vector x_bar;
  Vector lambda_bar;
  std::uint64_t k = 0;

  Vector weighted_x_sum;
  Vector weighted_z_sum;
  Vector weighted_lambda_sum;
  double raw_weight_sum = 0.0;

  /// max_j |lambda^j| over the iterates seen so far.
  double max_dual_norm = 0.0;

  /// x0 = 0, lambda0 = 0, z0 = F x0.
  static SolverState initial(const Problem& problem);
};

/// Output triple (x~, z~, lambda~) of a run.
struct Averages
{
  Vector x;
  Vector z;
  Vector lambda;
  std::uint64_t iterates = 0;
};

/// Normalised running averages; the weight total is the analytic sum over
/// k = 0..state.k-1. Throws InputError before the first iteration.
Averages averages(const SolverState& state, Regime regime);

/// Quantities realized during one step that the pathwise inequality check
/// needs: the step, both sampled gradients and the full gradients at the
/// same points.
struct StepCapture
{
  double step = 0.0;
  Vector sampled_grad_x;     // grad l(x^k, xi_1)
  Vector sampled_grad_x_bar; // grad l(xbar^{k+1}, xi_2)
  Vector full_grad_x;        // grad l(x^k)
  Vector full_grad_x_bar;    // grad l(xbar^{k+1})
  std::vector<std::size_t> xi1;
  std::vector<std::size_t> xi2;
};

/// argmin_z r2(z) + <lambda, z> + (gamma/2)|F x - z|^2 = prox_{r2/gamma}(F x - lambda/gamma)
/// at the state's current (x, lambda).
Vector update_z(const SolverState& state, const Problem& problem, double gamma);

/// l + r1 + r2(F .) at x.
double composite_objective(const Problem& problem, const Dataset& data, std::span<const double> x);

/// Evaluates a trace row at the averaged point.
TraceRecord evaluate_trace(const Problem& problem,
                           const Dataset& train,
                           const Dataset& test,
                           const Averages& avg,
                           std::uint64_t iteration,
                           double max_dual_norm);

/// Stepwise driver. Owns the state and the single random stream of a run.
class SpdpegSolver
{
public:
  /// Validates problem and config against the data; throws InputError.
  SpdpegSolver(const Problem& problem, const Dataset& train, SolverConfig config);

  /// One full iteration: z-update, predictor (xbar, lambdabar), corrector
  /// (x, lambda), optional ball projection, averaging. When `capture` is
  /// given, the realized gradients and the full gradients at the same points
  /// are stored in it (costs two extra full-gradient evaluations). Throws
  /// DivergenceError if an iterate becomes non-finite or exceeds 1e12.
  void step(StepCapture* capture = nullptr);

  /// Runs only the extra-gradient part of an iteration; `z^{k+1}` must
  /// already be stored in state().z. Exposed for tests.
  void update_extragradient(StepCapture* capture = nullptr);

  const SolverState& state() const noexcept { return state_; }
  SolverState& mutable_state() noexcept { return state_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  const SolverConfig& config() const noexcept { return config_; }
  RandomState& rng() noexcept { return rng_; }
  Averages current_averages() const { return averages(state_, schedule_.regime); }

  /// Step c^{k+1} actually used at iteration k (schedule times step_scale).
  double step_at(std::uint64_t k) const { return config_.step_scale * step_size(schedule_, k); }

private:
  const Problem& problem_;
  const Dataset& train_;
  SolverConfig config_;
  Schedule schedule_;
  SolverState state_;
  RandomState rng_;
  SamplingMode mode_;

  // workspace
  Vector fx_, ftl_, grad_, tmp_;
  std::vector<std::size_t> idx_;
};

struct RunOptions
{
  /// Fill TraceRecord::wall_seconds. Off keeps trace files reproducible byte for byte.
  bool record_wall_time = false;
  /// Called after every iteration.
  std::function<void(const SolverState&)> on_iteration;
};

struct RunResult
{
  Averages averages;
  std::vector<TraceRecord> trace;
  SolverState final_state;
};

/// max_iters iterations; a trace row every eval_every iterations and after the
/// last, evaluated at the current running average.
RunResult run(const Problem& problem,
              const Dataset& train,
              const Dataset& test,
              const SolverConfig& config,
              const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Pathwise inequality diagnostic

/// Arbitrary comparison point (z, x, lambda); x must be feasible.
struct Lemma1Reference
{
  Vector z;
  Vector x;
  Vector lambda;
};

struct Lemma1Report
{
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;          // lhs - rhs
  double relative_slack = 0.0; // slack / max(1, |lhs|, |rhs|)
  double delta_norm_sq = 0.0;
  double delta_bar_norm_sq = 0.0;
  double dual_coefficient = 0.0;   // 1/(2 gamma) - 4 c sigma
  double primal_coefficient = 0.0; // 1/(2c) - gamma sigma/2 - 4 c L^2
  bool coefficient_negative = false;
};

/// Evaluates both sides of the one-step inequality satisfied by
/// (z^{k+1}, xbar^{k+1}, lambdabar^{k+1}, x^{k+1}, lambda^{k+1}) for the
/// given reference point, using the noise terms delta = grad l(x^k, xi_1) -
/// grad l(x^k) and deltabar = grad l(xbar, xi_2) - grad l(xbar). `before` is
/// the state at iteration k, `after` at k+1. Throws InputError when the
/// capture is incomplete or the reference is infeasible.
Lemma1Report check_lemma1(const SolverState& before,
                          const SolverState& after,
                          const Problem& problem,
                          const SolverConfig& config,
                          const Lemma1Reference& reference,
                          const StepCapture& capture);

} // namespace spdpeg
