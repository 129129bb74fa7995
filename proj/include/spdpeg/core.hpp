#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spdpeg/common.hpp"
#include "spdpeg/sparse_matrix.hpp"

namespace spdpeg {

// ---------------------------------------------------------------------------
// Data

struct Sample
{
  std::vector<std::pair<std::uint32_t, double>> features; // sorted by index
  double label = 1.0;                                      // -1 or +1

  double dot(std::span<const double> x) const
  {
    double s = 0.0;
    for (auto const& [j, v] : features) s += v * x[j];
    return s;
  }
  double squared_norm() const
  {
    double s = 0.0;
    for (auto const& [j, v] : features) s += v * v;
    return s;
  }

  bool operator==(const Sample&) const = default;
};

struct Dataset
{
  std::vector<Sample> samples;
  std::size_t dimension = 0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  /// Throws InputError when a label is not +-1 or an index is out of range.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

// ---------------------------------------------------------------------------
// Problem description

enum class LossKind { Logistic, LeastSquares };
enum class RegKind { None, L1, SquaredL2 };
enum class Regime { Convex, SCUniform, SCNonUniform };

std::string to_string(LossKind);
std::string to_string(RegKind);
std::string to_string(Regime);
LossKind parse_loss_kind(const std::string&);
RegKind parse_reg_kind(const std::string&);
Regime parse_regime(const std::string&);

/// A regularizer term `weight * r(.)` with a closed-form prox.
struct ProxSpec
{
  RegKind kind = RegKind::None;
  double weight = 0.0;
};

/// min  l(x) + r1(x) + r2(F x),  l(x) = mean_i loss(x; a_i, b_i) + (folded_l2/2)|x|^2
struct Problem
{
  LossKind loss = LossKind::Logistic;
  /// Ridge term carried inside the smooth loss so that l is strongly convex.
  double folded_l2 = 0.0;
  ProxSpec r1;
  ProxSpec r2{RegKind::L1, 0.0};
  SparseMatrix penalty;
  double strong_convexity_mu = 0.0;
  std::optional<double> feasible_radius;

  std::size_t dimension() const noexcept { return penalty.n_cols(); }
  std::size_t dual_dimension() const noexcept { return penalty.n_rows(); }

  /// Checks the problem against a dataset. Throws InputError.
  void validate(const Dataset& data) const;
};

struct SolverConfig
{
  double gamma = 1.0;
  Regime regime = Regime::Convex;
  std::uint64_t max_iters = 1000;
  std::uint64_t seed = 0;
  std::size_t batch_size = 1;
  std::uint64_t eval_every = 100;
  double lipschitz_L = 1.0;
  double sigma_max_FtF = 0.0;
  std::optional<double> lambda_diameter_hint;
  std::optional<double> x_diameter_hint;

  /// Use the exact full gradient in place of sampled ones (deterministic mode).
  bool full_batch = false;
  /// Multiplies every scheduled step. 1 keeps the analysed schedule.
  double step_scale = 1.0;

  /// Throws InputError when fields are out of range or the regime needs a
  /// strongly convex loss the problem does not have.
  void validate(const Problem& problem) const;
};

// ---------------------------------------------------------------------------
// Constants

/// max{8 gamma s + mu, sqrt(8 L^2 + gamma s) + mu} with s = sigma_max(F^T F).
double compute_L_tilde(double gamma, double sigma_max, double lipschitz_L, double mu);

/// Per-sample worst-case curvature bound of the data term:
/// 0.25 max|a_i|^2 for logistic, max|a_i|^2 for least squares.
double estimate_lipschitz(const Dataset& data, LossKind loss);

/// Lipschitz constant of grad l for the whole smooth part, folded ridge included.
double problem_lipschitz(const Problem& problem, const Dataset& data);

} // namespace spdpeg
