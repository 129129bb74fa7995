#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "spdpeg/baselines.hpp"
#include "spdpeg/data_io.hpp"
#include "spdpeg/penalty.hpp"
#include "spdpeg/prox.hpp"

using namespace spdpeg;

namespace {

struct Instance
{
  Dataset data;
  Problem problem;
  SolverConfig config;
};

Instance flr_instance(std::size_t d, std::size_t n, std::uint64_t seed)
{
  Instance in;
  in.data = synthesize({SyntheticKind::FusedSignal, d, n, 0.1, seed}).data;
  normalize_max_abs(in.data);
  in.problem.loss = LossKind::Logistic;
  in.problem.r1 = {RegKind::L1, 5e-3};
  in.problem.r2 = {RegKind::L1, 5e-3};
  in.problem.penalty = build_fused_matrix(d);
  in.config.lipschitz_L = problem_lipschitz(in.problem, in.data);
  in.config.sigma_max_FtF = sigma_max_upper_bound(in.problem.penalty);
  in.config.max_iters = 500;
  in.config.eval_every = 50;
  return in;
}

} // namespace

TEST_CASE("baseline kind validation")
{
  CHECK_NOTHROW(BaselineKind{BaselineKind::Tag::EGFull, 1.0}.validate());
  CHECK_THROWS_AS((BaselineKind{BaselineKind::Tag::StochLinADMM, 0.0}.validate()), InputError);
  CHECK_THROWS_AS((BaselineKind{BaselineKind::Tag::StochLinADMM, -1.0}.validate()), InputError);
  CHECK_THROWS_AS((BaselineKind{BaselineKind::Tag::EGFull, std::nan("")}.validate()), InputError);
}

TEST_CASE("solver names")
{
  for (auto n : {SolverName::Spdpeg, SolverName::EGFull, SolverName::SLinADMM})
    CHECK(parse_solver_name(to_string(n)) == n);
  CHECK(to_string(SolverName::SLinADMM) == "slinadmm");
  CHECK_THROWS_AS(parse_solver_name("sgd"), InputError);
}

TEST_CASE("eg-full equals SPDPEG in full-batch mode")
{
  auto in = flr_instance(8, 40, 2);
  in.config.seed = 4;
  auto const eg = run_eg_full(in.problem, in.data, in.data, in.config);
  in.config.full_batch = true;
  auto const sp = run(in.problem, in.data, in.data, in.config);
  CHECK(eg.trace == sp.trace);
  CHECK(eg.averages.x == sp.averages.x);
  in.config.seed = 99;
  CHECK(run_solver(SolverName::EGFull, in.problem, in.data, in.data, in.config).trace == eg.trace);
}

TEST_CASE("eg-full steps satisfy the lemma with zero noise")
{
  auto in = flr_instance(10, 50, 3);
  in.config.full_batch = true;
  RandomState rng(5);
  SpdpegSolver solver(in.problem, in.data, in.config);
  for (int k = 0; k < 300; ++k) {
    SolverState const before = solver.state();
    StepCapture cap;
    solver.step(&cap);
    for (int r = 0; r < 5; ++r) {
      Lemma1Reference ref{testing::random_vector(9, rng), testing::random_vector(10, rng), testing::random_vector(9, rng)};
      auto const rep = check_lemma1(before, solver.state(), in.problem, solver.config(), ref, cap);
      CHECK(rep.delta_norm_sq == 0.0);
      CHECK(rep.delta_bar_norm_sq == 0.0);
      REQUIRE(rep.relative_slack >= -1e-12);
    }
  }
}

TEST_CASE("eg-full reaches the ridge least-squares minimizer")
{
  RandomState rng(17);
  std::size_t const d = 5, n = 60;
  // small features and a large ridge keep the per-step contraction strong,
  // so the weighted average catches up with the iterate well within the budget
  auto data = testing::random_dataset(n, d, rng);
  for (auto& s : data.samples)
    for (auto& f : s.features) f.second *= 0.1;
  double const mu = 1.0;
  Problem p;
  p.loss = LossKind::LeastSquares;
  p.folded_l2 = mu;
  p.strong_convexity_mu = mu;
  p.r2 = {RegKind::L1, 0.0};
  p.penalty = build_fused_matrix(d);
  SolverConfig c;
  c.gamma = 0.01;
  c.regime = Regime::SCNonUniform;
  c.max_iters = 10000;
  c.eval_every = 10000;
  c.lipschitz_L = problem_lipschitz(p, data);
  c.sigma_max_FtF = sigma_max_upper_bound(p.penalty);
  auto const r = run_eg_full(p, data, data, c);

  // (A^T A / n + mu I) x = A^T b / n
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto const& [j, v] : data.samples[i].features) A(static_cast<Eigen::Index>(i), j) = v;
    b(static_cast<Eigen::Index>(i)) = data.samples[i].label;
  }
  Eigen::MatrixXd H = A.transpose() * A / static_cast<double>(n);
  H.diagonal().array() += mu;
  Eigen::VectorXd const xs = H.ldlt().solve(A.transpose() * b / static_cast<double>(n));
  for (std::size_t j = 0; j < d; ++j) {
    CHECK(std::abs(r.averages.x[j] - xs(static_cast<Eigen::Index>(j))) <= 1e-6);
    CHECK(std::abs(r.final_state.x[j] - xs(static_cast<Eigen::Index>(j))) <= 1e-6);
  }
}

TEST_CASE("slinadmm with a zero penalty is proximal SGD")
{
  auto in = flr_instance(6, 30, 4);
  in.problem.penalty = SparseMatrix::zero(3, 6);
  in.config.sigma_max_FtF = 0.0;
  in.config.seed = 8;
  StochLinADMM solver(in.problem, in.data, in.config);

  RandomState rng(in.config.seed);
  Vector x(6, 0.0);
  for (std::uint64_t k = 0; k < 200; ++k) {
    solver.step();
    double const c = solver.step_at(k);
    auto const g = stochastic_gradient(in.problem, in.data, x, rng, 1);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= c * g.gradient[j];
    apply_prox_inplace(in.problem.r1, x, c);
    REQUIRE(solver.state().x == x);
    CHECK(solver.state().lambda == Vector(3, 0.0));
  }
}

TEST_CASE("slinadmm step matches a hand execution")
{
  auto in = flr_instance(4, 20, 5);
  in.config.gamma = 0.7;
  in.config.seed = 2;
  StochLinADMM solver(in.problem, in.data, in.config);
  for (int k = 0; k < 5; ++k) solver.step();
  SolverState const before = solver.state();
  RandomState rng = RandomState(in.config.seed);
  for (int k = 0; k < 5; ++k) stochastic_gradient(in.problem, in.data, Vector(4, 0.0), rng, 1);
  solver.step();

  auto const& F = in.problem.penalty;
  double const c = solver.step_at(5), gamma = 0.7;
  auto const g = stochastic_gradient(in.problem, in.data, before.x, rng, 1);
  Vector v = matvec(F, before.x);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = gamma * (v[i] - before.z[i]) - before.lambda[i];
  Vector const ftv = matvec_transpose(F, v);
  Vector x = before.x;
  for (std::size_t j = 0; j < x.size(); ++j) x[j] -= c * (g.gradient[j] + ftv[j]);
  apply_prox_inplace(in.problem.r1, x, c);
  Vector w = matvec(F, x);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= before.lambda[i] / gamma;
  Vector const z = prox_l1(w, 5e-3 / gamma);
  Vector const fx = matvec(F, x);
  Vector lam = before.lambda;
  for (std::size_t i = 0; i < lam.size(); ++i) lam[i] -= gamma * (fx[i] - z[i]);

  CHECK(testing::max_abs_diff(solver.state().x, x) <= 1e-15);
  CHECK(testing::max_abs_diff(solver.state().z, z) <= 1e-15);
  CHECK(testing::max_abs_diff(solver.state().lambda, lam) <= 1e-15);
}

TEST_CASE("baselines are deterministic and share the trace schema")
{
  auto in = flr_instance(8, 40, 6);
  in.config.seed = 13;
  for (auto name : {SolverName::Spdpeg, SolverName::EGFull, SolverName::SLinADMM}) {
    CAPTURE(to_string(name));
    auto const a = run_solver(name, in.problem, in.data, in.data, in.config);
    auto const b = run_solver(name, in.problem, in.data, in.data, in.config);
    CHECK(a.trace == b.trace);
    REQUIRE(a.trace.size() == 10);
    CHECK(a.trace.back().iteration == 500);
    CHECK(a.averages.iterates == 500);
  }
}

TEST_CASE("slinadmm reports divergence")
{
  Dataset data = testing::dense_dataset({{30.0, -20.0}, {10.0, 40.0}}, {1.0, -1.0});
  Problem p;
  p.loss = LossKind::LeastSquares;
  p.penalty = SparseMatrix::from_triplets(1, 2, {{0, 0, 1.0}, {0, 1, -1.0}});
  SolverConfig c;
  c.lipschitz_L = problem_lipschitz(p, data);
  c.sigma_max_FtF = 2.0;
  c.step_scale = 1e3;
  c.max_iters = 1000;
  CHECK_THROWS_AS(run_stoch_linadmm(p, data, data, c), DivergenceError);
}
