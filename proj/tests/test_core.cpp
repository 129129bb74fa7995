#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "helpers.hpp"
#include "spdpeg/core.hpp"
#include "spdpeg/penalty.hpp"
#include "spdpeg/sparse_matrix.hpp"

using namespace spdpeg;

namespace {

SparseMatrix first_difference_2x3()
{
  return SparseMatrix::from_triplets(2, 3, {{0, 0, 1.0}, {0, 1, -1.0}, {1, 1, 1.0}, {1, 2, -1.0}});
}

SparseMatrix random_sparse(std::size_t rows, std::size_t cols, double density, RandomState& rng)
{
  std::vector<SparseMatrix::Triplet> t;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (rng.uniform() < density) t.push_back({i, j, rng.normal()});
  return SparseMatrix::from_triplets(rows, cols, t);
}

// Largest eigenvalue of M^T M from a dense symmetric eigensolver.
double dense_sigma_max(const SparseMatrix& m)
{
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n_rows()), static_cast<Eigen::Index>(m.n_cols()));
  for (auto const& t : m.triplets()) a(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
  return es.eigenvalues().maxCoeff();
}

} // namespace

TEST_CASE("matvec examples")
{
  auto const m = first_difference_2x3();
  CHECK(matvec(m, Vector{3, 1, 1}) == Vector{2, 0});
  CHECK(matvec(SparseMatrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
  CHECK(matvec(SparseMatrix::zero(2, 3), Vector{5, -1, 7}) == Vector{0, 0});
  CHECK_THROWS_AS(matvec(m, Vector{1, 2}), InputError);
  CHECK_THROWS_AS(matvec_transpose(m, Vector{1, 2, 3}), InputError);
}

TEST_CASE("csr construction is validated")
{
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), InputError);               // offsets too short
  CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), InputError);               // column out of range
  CHECK_THROWS_AS(SparseMatrix(1, 3, {0, 2}, {1, 1}, {1.0, 2.0}), InputError);       // repeated column
  CHECK_THROWS_AS(SparseMatrix(1, 3, {0, 2}, {2, 0}, {1.0, 2.0}), InputError);       // decreasing columns
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 2.0}), InputError);    // offsets decrease
  CHECK_THROWS_AS(SparseMatrix(1, 1, {0, 1}, {0}, {NAN}), InputError);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(1, 2, {{0, 1, 1.0}, {0, 1, 2.0}}), InputError);
  CHECK_NOTHROW(SparseMatrix(2, 2, {0, 0, 1}, {1}, {3.0}));
}

TEST_CASE("basis probes reproduce every stored entry")
{
  RandomState rng(11);
  auto const m = random_sparse(7, 5, 0.4, rng);
  for (std::size_t j = 0; j < m.n_cols(); ++j) {
    Vector e(m.n_cols(), 0.0);
    e[j] = 1.0;
    auto const col = matvec(m, e);
    for (std::size_t i = 0; i < m.n_rows(); ++i) CHECK(col[i] == m.at(i, j));
  }
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    Vector e(m.n_rows(), 0.0);
    e[i] = 1.0;
    auto const row = matvec_transpose(m, e);
    for (std::size_t j = 0; j < m.n_cols(); ++j) CHECK(row[j] == m.at(i, j));
  }
}

TEST_CASE("adjoint identity on random matrices")
{
  RandomState rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t const r = 1 + rng.index(12), c = 1 + rng.index(12);
    auto const m = random_sparse(r, c, 0.3, rng);
    auto const u = testing::random_vector(c, rng);
    auto const v = testing::random_vector(r, rng);
    double const lhs = dot(matvec(m, u), v);
    double const rhs = dot(u, matvec_transpose(m, v));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("power iteration examples")
{
  // M^T M = tridiag(-1, {1,2,1}, -1) has spectrum {0, 1, 3}
  CHECK(power_iteration_sigma_max(first_difference_2x3()) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(power_iteration_sigma_max(SparseMatrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(power_iteration_sigma_max(SparseMatrix::from_triplets(1, 1, {{0, 0, 2.0}})) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(power_iteration_sigma_max(SparseMatrix::zero(3, 3)) == 0.0);
  // path Laplacian on 4 nodes: max eigenvalue 2 - 2 cos(3 pi / 4)
  CHECK(power_iteration_sigma_max(build_fused_matrix(4)) ==
        doctest::Approx(2.0 - 2.0 * std::cos(3.0 * M_PI / 4.0)).epsilon(1e-9));
}

TEST_CASE("power iteration agrees with a dense eigensolver and bounds Rayleigh quotients")
{
  RandomState rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    auto const m = random_sparse(3 + rng.index(10), 2 + rng.index(10), 0.5, rng);
    if (m.nnz() == 0) continue;
    double const s = power_iteration_sigma_max(m);
    CHECK(s == doctest::Approx(dense_sigma_max(m)).epsilon(1e-7));
    CHECK(s <= sigma_max_upper_bound(m) * (1 + 1e-12));
    for (int p = 0; p < 20; ++p) {
      auto const v = testing::random_vector(m.n_cols(), rng);
      auto const mv = matvec(m, v);
      CHECK(s >= dot(mv, mv) / dot(v, v) - 1e-10 * s);
    }
  }
}

TEST_CASE("power iteration reports non-convergence with its last estimate")
{
  auto const m = build_fused_matrix(50);
  try {
    power_iteration_sigma_max(m, {1e-15, 3});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_estimate() > 0.0);
    CHECK(e.last_estimate() <= 4.0);
  }
}

TEST_CASE("power iteration is deterministic")
{
  auto const m = build_fused_matrix(30);
  CHECK(power_iteration_sigma_max(m) == power_iteration_sigma_max(m));
}

TEST_CASE("compute_L_tilde examples")
{
  CHECK(compute_L_tilde(0.5, 3.0, 2.0, 0.0) == 12.0);
  CHECK(compute_L_tilde(1.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK(compute_L_tilde(1.0, 0.0, 1.0, 1.0) == doctest::Approx(std::sqrt(8.0) + 1.0).epsilon(1e-15));
  CHECK_THROWS_AS(compute_L_tilde(0.0, 1.0, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(compute_L_tilde(1.0, -1.0, 1.0, 0.0), InputError);
}

TEST_CASE("compute_L_tilde is monotone in each argument")
{
  RandomState rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    double const g = rng.uniform(0.01, 5), s = rng.uniform(0, 5), l = rng.uniform(0, 5), mu = rng.uniform(0, 2);
    double const base = compute_L_tilde(g, s, l, mu);
    double const h = rng.uniform(0, 1);
    CHECK(compute_L_tilde(g + h, s, l, mu) >= base);
    CHECK(compute_L_tilde(g, s + h, l, mu) >= base);
    CHECK(compute_L_tilde(g, s, l + h, mu) >= base);
    CHECK(compute_L_tilde(g, s, l, mu + h) >= base);
  }
}

TEST_CASE("estimate_lipschitz examples")
{
  auto const data = testing::dense_dataset({{2, 0}, {1, 1}}, {1, -1});
  CHECK(estimate_lipschitz(data, LossKind::Logistic) == 1.0);
  CHECK(estimate_lipschitz(data, LossKind::LeastSquares) == 4.0);
  auto const zero = testing::dense_dataset({{0, 0}}, {1});
  CHECK(estimate_lipschitz(zero, LossKind::Logistic) == 0.0);
  CHECK_THROWS_AS(estimate_lipschitz(Dataset{}, LossKind::Logistic), InputError);
}

TEST_CASE("enum string forms round-trip")
{
  for (auto k : {LossKind::Logistic, LossKind::LeastSquares}) CHECK(parse_loss_kind(to_string(k)) == k);
  for (auto k : {RegKind::None, RegKind::L1, RegKind::SquaredL2}) CHECK(parse_reg_kind(to_string(k)) == k);
  for (auto k : {Regime::Convex, Regime::SCUniform, Regime::SCNonUniform}) CHECK(parse_regime(to_string(k)) == k);
  CHECK_THROWS_AS(parse_regime("fast"), InputError);
}

TEST_CASE("problem and config validation")
{
  auto const data = testing::dense_dataset({{1, 0, 0}, {0, 1, 1}}, {1, -1});
  Problem p;
  p.penalty = build_fused_matrix(3);
  CHECK_NOTHROW(p.validate(data));

  Problem wrong = p;
  wrong.penalty = build_fused_matrix(4);
  CHECK_THROWS_AS(wrong.validate(data), InputError);

  Problem bad_mu = p;
  bad_mu.strong_convexity_mu = 0.1; // nothing folded in
  CHECK_THROWS_AS(bad_mu.validate(data), InputError);
  bad_mu.folded_l2 = 0.1;
  CHECK_NOTHROW(bad_mu.validate(data));

  Problem neg = p;
  neg.r1 = {RegKind::L1, -1.0};
  CHECK_THROWS_AS(neg.validate(data), InputError);

  Problem radius = p;
  radius.feasible_radius = 0.0;
  CHECK_THROWS_AS(radius.validate(data), InputError);

  SolverConfig c;
  c.sigma_max_FtF = 3.0;
  CHECK_NOTHROW(c.validate(p));
  c.regime = Regime::SCNonUniform;
  CHECK_THROWS_AS(c.validate(p), InputError);
  CHECK_NOTHROW(c.validate(bad_mu));
  c.regime = Regime::Convex;
  c.gamma = 0.0;
  CHECK_THROWS_AS(c.validate(p), InputError);
  c.gamma = 1.0;
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(p), InputError);
}

TEST_CASE("dataset validation")
{
  auto data = testing::dense_dataset({{1, 0}}, {1});
  CHECK_NOTHROW(data.validate());
  data.samples[0].label = 0.5;
  CHECK_THROWS_AS(data.validate(), InputError);
  data.samples[0].label = -1;
  data.samples[0].features.emplace_back(5, 1.0);
  CHECK_THROWS_AS(data.validate(), InputError);
}
