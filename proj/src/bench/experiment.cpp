#include "spdpeg/bench/experiment.hpp"

#include "spdpeg/penalty.hpp"
#include "spdpeg/sparse_matrix.hpp"

namespace spdpeg::bench {

std::string to_string(Task t)
{
  return t == Task::FLR ? "flr" : "ggrlr";
}

Task parse_task(const std::string& s)
{
  if (s == "flr") return Task::FLR;
  if (s == "ggrlr") return Task::GGRLR;
  throw InputError("unknown task '" + s + "'");
}

std::string to_string(GraphSource g)
{
  return g == GraphSource::True ? "true" : "estimated";
}

GraphSource parse_graph_source(const std::string& s)
{
  if (s == "true") return GraphSource::True;
  if (s == "estimated") return GraphSource::Estimated;
  throw InputError("unknown graph source '" + s + "'");
}

double default_lambda_reg(Task t)
{
  return t == Task::FLR ? 5e-3 : 1e-5;
}

double default_gamma_reg(Task t)
{
  return t == Task::FLR ? 5e-4 : 1e-2;
}

double ExperimentSpec::lambda_reg_value() const
{
  return lambda_reg.value_or(default_lambda_reg(task));
}

double ExperimentSpec::gamma_reg_value() const
{
  return gamma_reg.value_or(default_gamma_reg(task));
}

SyntheticSpec ExperimentSpec::synthetic_value() const
{
  if (synthetic) return *synthetic;
  SyntheticSpec s;
  s.kind = task == Task::FLR ? SyntheticKind::FusedSignal : SyntheticKind::GraphLogistic;
  return s;
}

Experiment build_experiment(const ExperimentSpec& spec)
{
  Experiment e;
  e.spec = spec;
  double const lambda_reg = spec.lambda_reg_value();
  double const gamma_reg = spec.gamma_reg_value();
  if (!(lambda_reg >= 0.0) || !(gamma_reg >= 0.0)) throw InputError("regularization weights must be >= 0");

  Dataset all;
  std::optional<GraphSpec> true_graph;
  if (spec.data_path) {
    all = load_libsvm_file(*spec.data_path);
  } else {
    auto syn = synthesize(spec.synthetic_value());
    all = std::move(syn.data);
    true_graph = std::move(syn.graph);
  }
  if (spec.normalize) normalize_max_abs(all);
  std::tie(e.train, e.test) = split(all, spec.split);

  auto& p = e.problem;
  p.loss = LossKind::Logistic;
  p.r2 = {RegKind::L1, lambda_reg};
  std::size_t const d = all.dimension;

  if (spec.penalty_file) {
    p.penalty = read_penalty_matrix_file(*spec.penalty_file);
    e.penalty_source = "file:" + *spec.penalty_file;
  } else if (spec.task == Task::FLR) {
    p.penalty = build_fused_matrix(d);
    e.penalty_source = "fused";
  } else if (spec.graph == GraphSource::True && true_graph) {
    p.penalty = build_graph_matrix(*true_graph);
    e.penalty_source = "graph:true";
  } else {
    p.penalty = build_graph_matrix(precision_graph_from_data(e.train, spec.ridge, spec.threshold));
    e.penalty_source = "graph:estimated";
  }

  if (spec.task == Task::FLR) {
    p.r1 = {RegKind::L1, gamma_reg};
    p.folded_l2 = 0.0;
    p.strong_convexity_mu = 0.0;
  } else {
    p.r1 = {RegKind::None, 0.0};
    p.folded_l2 = gamma_reg;
    p.strong_convexity_mu = gamma_reg;
  }
  p.validate(e.train);

  e.lipschitz_L = problem_lipschitz(p, e.train);
  e.sigma_max = p.penalty.nnz() > 0 ? power_iteration_sigma_max(p.penalty) : 0.0;
  return e;
}

SolverConfig make_config(const Experiment& e, const RunSettings& s, std::uint64_t seed)
{
  SolverConfig c;
  c.gamma = s.gamma;
  c.regime = s.regime;
  c.max_iters = s.iters;
  c.seed = seed;
  c.batch_size = s.batch_size;
  c.eval_every = s.eval_every;
  c.lipschitz_L = e.lipschitz_L;
  c.sigma_max_FtF = e.sigma_max;
  c.step_scale = s.step_scale;
  c.validate(e.problem);
  return c;
}

} // namespace spdpeg::bench
