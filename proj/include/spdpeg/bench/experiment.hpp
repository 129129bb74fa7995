#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdpeg/baselines.hpp"
#include "spdpeg/core.hpp"
#include "spdpeg/data_io.hpp"

namespace spdpeg::bench {

enum class Task { FLR, GGRLR };

std::string to_string(Task);
Task parse_task(const std::string&);

/// Where the penalty graph of a GGRLR problem comes from.
enum class GraphSource { True, Estimated };

std::string to_string(GraphSource);
GraphSource parse_graph_source(const std::string&);

/// Everything that determines the data split and the Problem.
struct ExperimentSpec
{
  Task task = Task::FLR;
  std::optional<std::string> data_path;
  std::optional<SyntheticSpec> synthetic; // used when data_path is absent
  bool normalize = false;
  SplitSpec split;
  std::optional<double> lambda_reg; // r2 weight; task default when absent
  std::optional<double> gamma_reg;  // r1 weight (flr) or folded ridge (ggrlr)
  std::optional<std::string> penalty_file;
  GraphSource graph = GraphSource::True;
  double ridge = 1e-2;
  double threshold = 1e-3;

  double lambda_reg_value() const;
  double gamma_reg_value() const;
  /// The synthetic spec actually used (task default when none is given).
  SyntheticSpec synthetic_value() const;
};

/// flr: lambda 5e-3, gamma 5e-4. ggrlr: lambda 1e-5, gamma 1e-2.
double default_lambda_reg(Task);
double default_gamma_reg(Task);

struct Experiment
{
  ExperimentSpec spec;
  Dataset train;
  Dataset test;
  Problem problem;
  double lipschitz_L = 0.0; // L-hat plus the folded ridge
  double sigma_max = 0.0;   // of F^T F
  std::string penalty_source;
};

/// flr:   logistic + gamma_reg |x|_1 + lambda_reg |L x|_1, L first differences.
/// ggrlr: logistic + (gamma_reg/2)|x|^2 folded into the loss (mu = gamma_reg)
///        + lambda_reg |F x|_1, F from the generator's graph, a precision
///        estimate on the training split, or a penalty file.
Experiment build_experiment(const ExperimentSpec& spec);

/// Solver settings tied to an experiment (gamma, schedule, budget).
struct RunSettings
{
  double gamma = 1.0;
  Regime regime = Regime::Convex;
  std::uint64_t iters = 10000;
  std::size_t batch_size = 1;
  std::uint64_t eval_every = 100;
  double step_scale = 1.0;
};

SolverConfig make_config(const Experiment& e, const RunSettings& s, std::uint64_t seed);

} // namespace spdpeg::bench
