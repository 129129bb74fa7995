#include "spdpeg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "spdpeg/prox.hpp"
#include "spdpeg/sparse_matrix.hpp"

namespace spdpeg {

namespace {

constexpr double kDivergenceBound = 1e12;

void check_bounded(std::span<const double> v, std::uint64_t k, const char* name)
{
  for (double e : v)
    if (!std::isfinite(e) || std::abs(e) > kDivergenceBound)
      throw DivergenceError(k, std::string("iterate ") + name + " diverged at iteration " + std::to_string(k));
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

} // namespace

SolverState SolverState::initial(const Problem& problem)
{
  SolverState s;
  std::size_t const d = problem.dimension();
  std::size_t const l = problem.dual_dimension();
  s.x.assign(d, 0.0);
  s.x_bar.assign(d, 0.0);
  s.z = matvec(problem.penalty, s.x);
  s.lambda.assign(l, 0.0);
  s.lambda_bar.assign(l, 0.0);
  s.weighted_x_sum.assign(d, 0.0);
  s.weighted_z_sum.assign(l, 0.0);
  s.weighted_lambda_sum.assign(l, 0.0);
  return s;
}

Averages averages(const SolverState& state, Regime regime)
{
  if (state.k == 0) throw InputError("averages: no iterations have been run");
  double const total = raw_weight_total(regime, state.k - 1);
  Averages a;
  a.iterates = state.k;
  a.x.resize(state.weighted_x_sum.size());
  a.z.resize(state.weighted_z_sum.size());
  a.lambda.resize(state.weighted_lambda_sum.size());
  for (std::size_t i = 0; i < a.x.size(); ++i) a.x[i] = state.weighted_x_sum[i] / total;
  for (std::size_t i = 0; i < a.z.size(); ++i) a.z[i] = state.weighted_z_sum[i] / total;
  for (std::size_t i = 0; i < a.lambda.size(); ++i) a.lambda[i] = state.weighted_lambda_sum[i] / total;
  return a;
}

Vector update_z(const SolverState& state, const Problem& problem, double gamma)
{
  if (!(gamma > 0.0)) throw InputError("update_z: gamma must be > 0");
  if (state.lambda.size() != problem.dual_dimension()) throw InputError("update_z: lambda has wrong dimension");
  Vector v = matvec(problem.penalty, state.x);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= state.lambda[i] / gamma;
  apply_prox_inplace(problem.r2, v, 1.0 / gamma);
  return v;
}

double composite_objective(const Problem& problem, const Dataset& data, std::span<const double> x)
{
  Vector const fx = matvec(problem.penalty, x);
  return loss_value(problem, data, x) + regularizer_value(problem.r1, x) + regularizer_value(problem.r2, fx);
}

TraceRecord evaluate_trace(const Problem& problem,
                           const Dataset& train,
                           const Dataset& test,
                           const Averages& avg,
                           std::uint64_t iteration,
                           double max_dual_norm)
{
  TraceRecord r;
  r.iteration = iteration;
  Vector const fx = matvec(problem.penalty, avg.x);
  r.objective =
    loss_value(problem, train, avg.x) + regularizer_value(problem.r1, avg.x) + regularizer_value(problem.r2, fx);
  r.test_loss = data_loss(problem.loss, test, avg.x);
  r.accuracy = accuracy(test, avg.x);
  r.feasibility_gap = std::sqrt(squared_distance(fx, avg.z));
  r.max_dual_norm = max_dual_norm;
  return r;
}

SpdpegSolver::SpdpegSolver(const Problem& problem, const Dataset& train, SolverConfig config)
  : problem_(problem)
  , train_(train)
  , config_(std::move(config))
  , rng_(config_.seed)
{
  problem_.validate(train_);
  config_.validate(problem_);
  schedule_ = Schedule::from_config(config_, problem_);
  state_ = SolverState::initial(problem_);
  mode_ = config_.full_batch ? SamplingMode::Enumerate : SamplingMode::WithReplacement;
  fx_.resize(problem_.dual_dimension());
  ftl_.resize(problem_.dimension());
  grad_.resize(problem_.dimension());
  tmp_.resize(problem_.dimension());
}

void SpdpegSolver::step(StepCapture* capture)
{
  state_.z = update_z(state_, problem_, config_.gamma);
  update_extragradient(capture);
}

void SpdpegSolver::update_extragradient(StepCapture* capture)
{
  auto& s = state_;
  std::uint64_t const k = s.k;
  double const c = step_at(k);
  double const gamma = config_.gamma;
  auto const& F = problem_.penalty;

  // predictor: xbar = prox(x - c (grad l(x, xi1) - F^T lambda)), lambdabar = lambda - gamma (F x - z)
  stochastic_gradient_into(problem_, train_, s.x, rng_, config_.batch_size, mode_, grad_, idx_);
  if (capture) {
    capture->step = c;
    capture->sampled_grad_x = grad_;
    capture->xi1 = idx_;
    capture->full_grad_x = full_gradient(problem_, train_, s.x);
  }
  matvec_transpose_into(F, s.lambda, ftl_);
  for (std::size_t j = 0; j < s.x.size(); ++j) s.x_bar[j] = s.x[j] - c * (grad_[j] - ftl_[j]);
  apply_prox_inplace(problem_.r1, s.x_bar, c);
  if (problem_.feasible_radius) project_ball(s.x_bar, *problem_.feasible_radius);

  matvec_into(F, s.x, fx_);
  for (std::size_t i = 0; i < s.lambda.size(); ++i) s.lambda_bar[i] = s.lambda[i] - gamma * (fx_[i] - s.z[i]);

  // corrector: x = prox(x - c (grad l(xbar, xi2) - F^T lambdabar)), lambda = lambda - gamma (F xbar - z)
  stochastic_gradient_into(problem_, train_, s.x_bar, rng_, config_.batch_size, mode_, grad_, idx_);
  if (capture) {
    capture->sampled_grad_x_bar = grad_;
    capture->xi2 = idx_;
    capture->full_grad_x_bar = full_gradient(problem_, train_, s.x_bar);
  }
  matvec_transpose_into(F, s.lambda_bar, ftl_);
  for (std::size_t j = 0; j < s.x.size(); ++j) s.x[j] = s.x[j] - c * (grad_[j] - ftl_[j]);
  apply_prox_inplace(problem_.r1, s.x, c);
  if (problem_.feasible_radius) project_ball(s.x, *problem_.feasible_radius);

  matvec_into(F, s.x_bar, fx_);
  for (std::size_t i = 0; i < s.lambda.size(); ++i) s.lambda[i] = s.lambda[i] - gamma * (fx_[i] - s.z[i]);

  check_bounded(s.z, k, "z");
  check_bounded(s.x_bar, k, "x_bar");
  check_bounded(s.lambda_bar, k, "lambda_bar");
  check_bounded(s.x, k, "x");
  check_bounded(s.lambda, k, "lambda");

  double const w = raw_weight(schedule_.regime, k);
  axpy(w, s.x_bar, s.weighted_x_sum);
  axpy(w, s.z, s.weighted_z_sum);
  axpy(w, s.lambda_bar, s.weighted_lambda_sum);
  s.raw_weight_sum += w;
  s.max_dual_norm = std::max(s.max_dual_norm, norm(s.lambda));
  s.k = k + 1;
}

RunResult run(const Problem& problem,
              const Dataset& train,
              const Dataset& test,
              const SolverConfig& config,
              const RunOptions& options)
{
  if (config.max_iters < 1) throw InputError("run: max_iters must be >= 1");
  SpdpegSolver solver(problem, train, config);
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

Lemma1Report check_lemma1(const SolverState& before,
                          const SolverState& after,
                          const Problem& problem,
                          const SolverConfig& config,
                          const Lemma1Reference& ref,
                          const StepCapture& cap)
{
  std::size_t const d = problem.dimension();
  std::size_t const l = problem.dual_dimension();
  if (cap.sampled_grad_x.size() != d || cap.sampled_grad_x_bar.size() != d || cap.full_grad_x.size() != d ||
      cap.full_grad_x_bar.size() != d || !(cap.step > 0.0))
    throw InputError("check_lemma1: step capture is missing gradients");
  if (after.k != before.k + 1) throw InputError("check_lemma1: states must be consecutive");
  if (ref.x.size() != d || ref.z.size() != l || ref.lambda.size() != l)
    throw InputError("check_lemma1: reference has wrong dimensions");
  if (problem.feasible_radius && norm(ref.x) > *problem.feasible_radius)
    throw InputError("check_lemma1: reference x lies outside the feasible set");

  double const c = cap.step;
  double const gamma = config.gamma;
  double const sigma = config.sigma_max_FtF;
  double const L = config.lipschitz_L;
  auto const& F = problem.penalty;

  auto const& z_new = after.z;
  auto const& x_bar = after.x_bar;
  auto const& lam_bar = after.lambda_bar;
  auto const& x_new = after.x;
  auto const& lam_new = after.lambda;
  auto const& x_old = before.x;
  auto const& lam_old = before.lambda;

  // G(z, xbar, lambdabar; xi2) = grad l(xbar, xi2) - F^T lambdabar
  Vector g2 = cap.sampled_grad_x_bar;
  Vector const ftl = matvec_transpose(F, lam_bar);
  for (std::size_t j = 0; j < d; ++j) g2[j] -= ftl[j];
  Vector resid = matvec(F, x_bar);
  for (std::size_t i = 0; i < l; ++i) resid[i] -= z_new[i];

  Vector dz(l), dx(d), dl(l);
  for (std::size_t i = 0; i < l; ++i) dz[i] = ref.z[i] - z_new[i];
  for (std::size_t j = 0; j < d; ++j) dx[j] = ref.x[j] - x_bar[j];
  for (std::size_t i = 0; i < l; ++i) dl[i] = ref.lambda[i] - lam_bar[i];

  Lemma1Report r;
  r.lhs = regularizer_value(problem.r1, ref.x) + regularizer_value(problem.r2, ref.z) -
          regularizer_value(problem.r1, x_bar) - regularizer_value(problem.r2, z_new) + dot(dz, lam_bar) +
          dot(dx, g2) + dot(dl, resid);

  r.delta_norm_sq = squared_distance(cap.sampled_grad_x, cap.full_grad_x);
  r.delta_bar_norm_sq = squared_distance(cap.sampled_grad_x_bar, cap.full_grad_x_bar);
  r.dual_coefficient = 1.0 / (2.0 * gamma) - 4.0 * c * sigma;
  r.primal_coefficient = 1.0 / (2.0 * c) - gamma * sigma / 2.0 - 4.0 * c * L * L;
  r.coefficient_negative = r.dual_coefficient < 0.0 || r.primal_coefficient < 0.0;

  r.rhs = squared_distance(ref.x, x_new) / (2.0 * c) - squared_distance(ref.x, x_old) / (2.0 * c) -
          4.0 * c * r.delta_norm_sq - 4.0 * c * r.delta_bar_norm_sq -
          squared_distance(ref.lambda, lam_old) / (2.0 * gamma) +
          squared_distance(ref.lambda, lam_new) / (2.0 * gamma) +
          r.dual_coefficient * squared_distance(lam_old, lam_bar) +
          r.primal_coefficient * squared_distance(x_old, x_bar) + squared_distance(x_new, x_bar) / (2.0 * c);

  r.slack = r.lhs - r.rhs;
  r.relative_slack = r.slack / std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)});
  return r;
}

} // namespace spdpeg
