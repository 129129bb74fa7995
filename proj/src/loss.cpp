#include "spdpeg/loss.hpp"

#include <algorithm>
#include <cmath>

#include "spdpeg/sparse_matrix.hpp"

namespace spdpeg {

namespace {

constexpr std::size_t kBlock = 64;

/// log(1 + exp(-m)) without overflow.
inline double logistic_loss(double margin)
{
  return margin >= 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

/// 1 / (1 + exp(m)).
inline double sigmoid_neg(double margin)
{
  if (margin >= 0.0) {
    double const e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

inline double sample_loss(LossKind loss, const Sample& s, std::span<const double> x)
{
  double const ax = s.dot(x);
  if (loss == LossKind::Logistic) return logistic_loss(s.label * ax);
  double const r = ax - s.label;
  return 0.5 * r * r;
}

/// Scalar c such that the per-sample gradient of the data term is c * a.
inline double gradient_coefficient(LossKind loss, const Sample& s, std::span<const double> x)
{
  double const ax = s.dot(x);
  if (loss == LossKind::Logistic) return -s.label * sigmoid_neg(s.label * ax);
  return ax - s.label;
}

inline void axpy_sparse(double c, const Sample& s, std::span<double> out)
{
  for (auto const& [j, v] : s.features) out[j] += c * v;
}

/// Pairwise sum of per-block partial sums; the result depends only on the
/// sample order, never on how the blocks are scheduled.
double pairwise_reduce(std::vector<double>& partial)
{
  std::size_t n = partial.size();
  if (n == 0) return 0.0;
  while (n > 1) {
    std::size_t const half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) partial[i] += partial[i + half];
    n = half;
  }
  return partial[0];
}

void pairwise_reduce(std::vector<Vector>& partial)
{
  std::size_t n = partial.size();
  while (n > 1) {
    std::size_t const half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i)
      for (std::size_t j = 0; j < partial[i].size(); ++j) partial[i][j] += partial[i + half][j];
    n = half;
  }
}

void add_fold(const Problem& problem, std::span<const double> x, std::span<double> out)
{
  if (problem.folded_l2 == 0.0) return;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += problem.folded_l2 * x[j];
}

void check_x(const Dataset& data, std::span<const double> x)
{
  if (x.size() != data.dimension) throw InputError("loss oracle: x has wrong dimension");
}

} // namespace

double data_loss(LossKind loss, const Dataset& data, std::span<const double> x)
{
  check_x(data, x);
  if (data.empty()) throw InputError("loss oracle: dataset is empty");
  std::size_t const n = data.size();
  std::vector<double> partial((n + kBlock - 1) / kBlock, 0.0);
  for (std::size_t b = 0; b < partial.size(); ++b) {
    double s = 0.0;
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) s += sample_loss(loss, data.samples[i], x);
    partial[b] = s;
  }
  return pairwise_reduce(partial) / static_cast<double>(n);
}

double loss_value(const Problem& problem, const Dataset& data, std::span<const double> x)
{
  double v = data_loss(problem.loss, data, x);
  if (problem.folded_l2 != 0.0) v += 0.5 * problem.folded_l2 * dot(x, x);
  return v;
}

void full_gradient_into(const Problem& problem, const Dataset& data, std::span<const double> x, std::span<double> out)
{
  check_x(data, x);
  if (data.empty()) throw InputError("loss oracle: dataset is empty");
  if (out.size() != data.dimension) throw InputError("full_gradient: output has wrong dimension");
  std::size_t const n = data.size();
  std::size_t const d = data.dimension;
  std::size_t const blocks = (n + kBlock - 1) / kBlock;
  if (blocks == 1) {
    std::fill(out.begin(), out.end(), 0.0);
    for (auto const& s : data.samples) axpy_sparse(gradient_coefficient(problem.loss, s, x), s, out);
  } else {
    std::vector<Vector> partial(blocks, Vector(d, 0.0));
    for (std::size_t b = 0; b < blocks; ++b)
      for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
        auto const& s = data.samples[i];
        axpy_sparse(gradient_coefficient(problem.loss, s, x), s, partial[b]);
      }
    pairwise_reduce(partial);
    std::copy(partial[0].begin(), partial[0].end(), out.begin());
  }
  double const inv = 1.0 / static_cast<double>(n);
  for (auto& e : out) e *= inv;
  add_fold(problem, x, out);
}

Vector full_gradient(const Problem& problem, const Dataset& data, std::span<const double> x)
{
  Vector out(data.dimension);
  full_gradient_into(problem, data, x, out);
  return out;
}

Vector sample_gradient(const Problem& problem, const Sample& sample, std::span<const double> x)
{
  Vector out(x.size(), 0.0);
  axpy_sparse(gradient_coefficient(problem.loss, sample, x), sample, out);
  add_fold(problem, x, out);
  return out;
}

void stochastic_gradient_into(const Problem& problem,
                              const Dataset& data,
                              std::span<const double> x,
                              RandomState& rng,
                              std::size_t batch_size,
                              SamplingMode mode,
                              std::span<double> out,
                              std::vector<std::size_t>& indices)
{
  if (data.empty()) throw InputError("stochastic_gradient: dataset is empty");
  if (batch_size < 1) throw InputError("stochastic_gradient: batch_size must be >= 1");
  check_x(data, x);
  if (mode == SamplingMode::Enumerate) {
    indices.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) indices[i] = i;
    full_gradient_into(problem, data, x, out);
    return;
  }
  indices.resize(batch_size);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t b = 0; b < batch_size; ++b) {
    std::size_t const i = rng.index(data.size());
    indices[b] = i;
    auto const& s = data.samples[i];
    axpy_sparse(gradient_coefficient(problem.loss, s, x), s, out);
  }
  double const inv = 1.0 / static_cast<double>(batch_size);
  for (auto& e : out) e *= inv;
  add_fold(problem, x, out);
}

GradSample stochastic_gradient(const Problem& problem,
                               const Dataset& data,
                               std::span<const double> x,
                               RandomState& rng,
                               std::size_t batch_size,
                               SamplingMode mode)
{
  GradSample g;
  g.gradient.assign(data.dimension, 0.0);
  stochastic_gradient_into(problem, data, x, rng, batch_size, mode, g.gradient, g.sample_indices);
  return g;
}

GradSample grad_composed(const Problem& problem,
                         const Dataset& data,
                         std::span<const double> x,
                         std::span<const double> lambda,
                         RandomState& rng,
                         std::size_t batch_size,
                         SamplingMode mode)
{
  if (lambda.size() != problem.penalty.n_rows()) throw InputError("grad_composed: lambda has wrong dimension");
  GradSample g = stochastic_gradient(problem, data, x, rng, batch_size, mode);
  Vector const ftl = matvec_transpose(problem.penalty, lambda);
  for (std::size_t j = 0; j < g.gradient.size(); ++j) g.gradient[j] -= ftl[j];
  return g;
}

NoiseStats estimate_noise(const Problem& problem,
                          const Dataset& data,
                          std::span<const double> x,
                          std::size_t trials,
                          std::uint64_t seed)
{
  if (trials < 1) throw InputError("estimate_noise: trials must be >= 1");
  Vector const full = full_gradient(problem, data, x);
  RandomState rng(seed);
  // accumulate deviations so a degenerate distribution gives exactly zero
  Vector mean(full.size(), 0.0), g(full.size());
  std::vector<std::size_t> idx;
  double second = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    stochastic_gradient_into(problem, data, x, rng, 1, SamplingMode::WithReplacement, g, idx);
    for (std::size_t j = 0; j < g.size(); ++j) mean[j] += g[j] - full[j];
    second += squared_distance(g, full);
  }
  NoiseStats stats;
  for (auto& m : mean) m /= static_cast<double>(trials);
  stats.empirical_bias_norm = norm(mean);
  stats.empirical_second_moment = second / static_cast<double>(trials);
  return stats;
}

double accuracy(const Dataset& data, std::span<const double> x)
{
  check_x(data, x);
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (auto const& s : data.samples) {
    double const pred = s.dot(x) >= 0.0 ? 1.0 : -1.0;
    if (pred == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace spdpeg
