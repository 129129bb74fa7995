#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spdpeg/core.hpp"
#include "spdpeg/rng.hpp"

namespace spdpeg {

/// A realized stochastic gradient and the samples it was drawn from.
struct GradSample
{
  Vector gradient;
  std::vector<std::size_t> sample_indices;
};

struct NoiseStats
{
  double empirical_bias_norm = 0.0;     // |mean_draws grad(x, xi) - grad l(x)|
  double empirical_second_moment = 0.0; // mean_draws |grad(x, xi) - grad l(x)|^2
};

enum class SamplingMode
{
  WithReplacement, // batch_size uniform draws
  Enumerate,       // every sample once; equals the full gradient bit for bit
};

/// Data-fitting loss alone, mean over samples. No folded ridge.
double data_loss(LossKind loss, const Dataset& data, std::span<const double> x);

/// l(x): data loss plus the folded ridge (folded_l2/2)|x|^2.
double loss_value(const Problem& problem, const Dataset& data, std::span<const double> x);

/// grad l(x), exact average of per-sample gradients (fixed-order pairwise sum).
Vector full_gradient(const Problem& problem, const Dataset& data, std::span<const double> x);
void full_gradient_into(const Problem& problem, const Dataset& data, std::span<const double> x, std::span<double> out);

/// Gradient of the single-sample loss, folded ridge included.
Vector sample_gradient(const Problem& problem, const Sample& sample, std::span<const double> x);

/// Unbiased estimate of grad l(x) from batch_size draws with replacement.
GradSample stochastic_gradient(const Problem& problem,
                               const Dataset& data,
                               std::span<const double> x,
                               RandomState& rng,
                               std::size_t batch_size,
                               SamplingMode mode = SamplingMode::WithReplacement);

/// Allocation-free form: writes into `out`, records drawn indices into `indices`.
void stochastic_gradient_into(const Problem& problem,
                              const Dataset& data,
                              std::span<const double> x,
                              RandomState& rng,
                              std::size_t batch_size,
                              SamplingMode mode,
                              std::span<double> out,
                              std::vector<std::size_t>& indices);

/// G(x, lambda; xi) = grad l(x, xi) - F^T lambda.
GradSample grad_composed(const Problem& problem,
                         const Dataset& data,
                         std::span<const double> x,
                         std::span<const double> lambda,
                         RandomState& rng,
                         std::size_t batch_size,
                         SamplingMode mode = SamplingMode::WithReplacement);

/// Monte-Carlo bias and second moment of single-sample gradients at x.
NoiseStats estimate_noise(const Problem& problem,
                          const Dataset& data,
                          std::span<const double> x,
                          std::size_t trials,
                          std::uint64_t seed);

/// Fraction of samples with sign(a^T x) == b, where a^T x = 0 predicts +1.
double accuracy(const Dataset& data, std::span<const double> x);

} // namespace spdpeg
