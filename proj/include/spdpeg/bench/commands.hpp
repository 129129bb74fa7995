#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spdpeg/bench/experiment.hpp"
#include "spdpeg/bench/rate_fit.hpp"
#include "spdpeg/bench/reference.hpp"

namespace spdpeg::bench {

// ---------------------------------------------------------------------------
// run

struct RunSpec
{
  ExperimentSpec experiment;
  RunSettings settings;
  std::vector<SolverName> solvers{SolverName::Spdpeg};
  std::vector<std::uint64_t> seeds{0};
  bool wall_time = false;
  std::string out_dir = ".";
};

struct RunOutcome
{
  std::vector<std::string> trace_files; // full paths, in (solver, seed) order
  std::string manifest_file;
  double lipschitz_L = 0.0;
  double sigma_max = 0.0;
  double L_tilde = 0.0;
};

/// Worker slots for independent runs: SPDPEG_THREADS if set, else the core count.
unsigned worker_slots();

/// Runs every (solver, seed), writes one trace CSV each plus manifest.json.
RunOutcome cmd_run(const RunSpec& spec, std::ostream& log);

/// JSON manifest holding every input of a run and the derived constants.
std::string manifest_json(const RunSpec& spec, const Experiment& e, const std::vector<std::string>& trace_names);

/// Inverse of manifest_json. The output directory is not part of the manifest.
RunSpec parse_manifest(const std::string& json_text);

/// Reruns a manifest into out_dir. Throws InputError if the derived constants
/// recomputed from the inputs differ from the recorded ones.
RunOutcome cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& log);

// ---------------------------------------------------------------------------
// verify-rates

struct RateSpec
{
  SyntheticSpec convex_instance{SyntheticKind::FusedSignal, 20, 250, 0.1, 1}; // 200 training samples
  SyntheticSpec sc_instance{SyntheticKind::GraphLogistic, 20, 250, 0.1, 1};
  double sc_mu = 1e-2;
  bool normalize = true;
  double gamma = 1.0;
  std::size_t seeds = 5;
  std::uint64_t convex_iters = 100000;
  std::uint64_t sc_iters = 100000;
  std::uint64_t ordering_iters = 10000;
  std::uint64_t window_lo = 100;
  std::size_t checkpoints_per_decade = 20;
  ReferenceOptions reference;

  double convex_max_slope = -0.35;
  double sc_max_slope = -0.8;
  double min_r_squared = 0.9;
};

struct RegimeCurve
{
  std::vector<std::uint64_t> iterations;
  std::vector<double> mean_gap;     // mean over seeds of objective - f*
  std::vector<double> mean_feas;    // mean over seeds of |F x~ - z~|
  std::vector<std::vector<double>> per_seed_gap;
};

struct RateReport
{
  double convex_reference = 0.0;
  double sc_reference = 0.0;
  RateFit convex_fit;
  RateFit sc_fit;
  RateFit sc_feasibility_fit;
  double uniform_gap_median = 0.0;    // at ordering_iters, median over seeds
  double nonuniform_gap_median = 0.0;
  bool convex_ok = false;
  bool sc_ok = false;
  bool ordering_ok = false;
  bool ok() const { return convex_ok && sc_ok && ordering_ok; }
};

/// Runs SPDPEG at log-spaced checkpoints (averaged iterate) for every seed.
RegimeCurve regime_curve(const Experiment& e,
                         const RunSettings& settings,
                         std::size_t seeds,
                         double reference_objective,
                         std::size_t per_decade);

RateReport cmd_verify_rates(const RateSpec& spec, std::ostream& log);

// ---------------------------------------------------------------------------
// check-lemma1

struct Lemma1Spec
{
  Task task = Task::FLR;
  SyntheticSpec instance{SyntheticKind::FusedSignal, 20, 125, 0.1, 3}; // 100 training samples
  bool deterministic = false;
  double gamma = 1.0;
  Regime regime = Regime::Convex;
  std::uint64_t steps = 1000;
  std::size_t references = 10;
  double step_scale = 1.0;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
};

struct Lemma1Summary
{
  double min_relative_slack = INFINITY;
  double min_slack = INFINITY;
  std::uint64_t checks = 0;
  std::uint64_t negative_coefficient_steps = 0;
  std::uint64_t steps_run = 0;
  /// Set when the iterates blew up; checking stops there.
  std::optional<std::uint64_t> diverged_at;
  bool ok = false;
};

Lemma1Summary cmd_check_lemma1(const Lemma1Spec& spec, std::ostream& log);

// ---------------------------------------------------------------------------
// plotdata

struct PlotSummaryRow
{
  std::string solver;
  std::string metric;
  std::uint64_t iteration = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Reads every trace matching `pattern` (solver and seed come from the file
/// name), writes the long CSV to out_file and the per-(solver, metric,
/// iteration) mean and standard error to <stem>_summary.csv next to it.
std::vector<PlotSummaryRow> cmd_plotdata(const std::string& pattern, const std::string& out_file, std::ostream& log);

} // namespace spdpeg::bench
