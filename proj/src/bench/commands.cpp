#include "spdpeg/bench/commands.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spdpeg/bench/trace_io.hpp"
#include "spdpeg/prox.hpp"
#include "spdpeg/schedule.hpp"
#include "spdpeg/sparse_matrix.hpp"

namespace spdpeg::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

/// Runs jobs 0..n-1 on up to worker_slots() threads; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
  unsigned const slots = std::max(1u, std::min<unsigned>(worker_slots(), static_cast<unsigned>(n)));
  if (slots <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < slots; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string g17(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// 1..t at roughly `per_decade` log-spaced points, always including t.
std::vector<std::uint64_t> log_checkpoints(std::uint64_t t, std::size_t per_decade)
{
  std::vector<std::uint64_t> out;
  double const step = std::pow(10.0, 1.0 / static_cast<double>(per_decade));
  double v = 1.0;
  while (v < static_cast<double>(t)) {
    auto const k = static_cast<std::uint64_t>(std::llround(v));
    if (out.empty() || k > out.back()) out.push_back(k);
    v *= step;
  }
  if (out.empty() || out.back() != t) out.push_back(t);
  return out;
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  std::size_t const n = v.size();
  if (n == 0) return NAN;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json experiment_to_json(const ExperimentSpec& s)
{
  json j;
  j["task"] = to_string(s.task);
  if (s.data_path)
    j["data"] = {{"kind", "file"}, {"path", *s.data_path}};
  else
    j["data"] = {{"kind", "synthetic"}, {"spec", s.synthetic_value().to_string()}};
  j["normalize"] = s.normalize;
  j["split"] = {{"train_fraction", s.split.train_fraction}, {"seed", s.split.seed}};
  j["lambda_reg"] = s.lambda_reg_value();
  j["gamma_reg"] = s.gamma_reg_value();
  j["penalty_file"] = s.penalty_file ? json(*s.penalty_file) : json(nullptr);
  j["graph"] = to_string(s.graph);
  j["ridge"] = s.ridge;
  j["threshold"] = s.threshold;
  return j;
}

ExperimentSpec experiment_from_json(const json& j)
{
  ExperimentSpec s;
  s.task = parse_task(j.at("task").get<std::string>());
  auto const& data = j.at("data");
  auto const kind = data.at("kind").get<std::string>();
  if (kind == "file")
    s.data_path = data.at("path").get<std::string>();
  else if (kind == "synthetic")
    s.synthetic = SyntheticSpec::parse(data.at("spec").get<std::string>());
  else
    throw InputError("manifest: unknown data kind '" + kind + "'");
  s.normalize = j.at("normalize").get<bool>();
  s.split.train_fraction = j.at("split").at("train_fraction").get<double>();
  s.split.seed = j.at("split").at("seed").get<std::uint64_t>();
  s.lambda_reg = j.at("lambda_reg").get<double>();
  s.gamma_reg = j.at("gamma_reg").get<double>();
  if (!j.at("penalty_file").is_null()) s.penalty_file = j.at("penalty_file").get<std::string>();
  s.graph = parse_graph_source(j.at("graph").get<std::string>());
  s.ridge = j.at("ridge").get<double>();
  s.threshold = j.at("threshold").get<double>();
  return s;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunOutcome execute(const RunSpec& spec, const Experiment& e, std::ostream& log)
{
  if (spec.solvers.empty()) throw InputError("run: no solver selected");
  if (spec.seeds.empty()) throw InputError("run: no seed selected");
  fs::create_directories(spec.out_dir);

  RunOutcome out;
  out.lipschitz_L = e.lipschitz_L;
  out.sigma_max = e.sigma_max;
  auto const probe = make_config(e, spec.settings, spec.seeds.front());
  out.L_tilde = Schedule::from_config(probe, e.problem).L_tilde;

  struct Job
  {
    SolverName solver;
    std::uint64_t seed;
    std::string name;
  };
  std::vector<Job> jobs;
  std::vector<std::string> names;
  for (auto s : spec.solvers)
    for (auto seed : spec.seeds) {
      jobs.push_back({s, seed, trace_file_name(to_string(s), seed)});
      names.push_back(jobs.back().name);
    }

  log << "task=" << to_string(e.spec.task) << " d=" << e.problem.dimension() << " n_train=" << e.train.size()
      << " n_test=" << e.test.size() << " penalty=" << e.penalty_source << " L=" << g17(e.lipschitz_L)
      << " sigma_max=" << g17(e.sigma_max) << " L_tilde=" << g17(out.L_tilde) << '\n';

  std::vector<double> finals(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    auto const& job = jobs[i];
    auto const cfg = make_config(e, spec.settings, job.seed);
    RunOptions opts;
    opts.record_wall_time = spec.wall_time;
    auto result = run_solver(job.solver, e.problem, e.train, e.test, cfg, opts);
    write_trace_csv_file((fs::path(spec.out_dir) / job.name).string(), result.trace);
    finals[i] = result.trace.back().objective;
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.trace_files.push_back((fs::path(spec.out_dir) / jobs[i].name).string());
    log << jobs[i].name << " final_objective=" << g17(finals[i]) << '\n';
  }

  out.manifest_file = (fs::path(spec.out_dir) / "manifest.json").string();
  std::ofstream mf(out.manifest_file, std::ios::binary);
  if (!mf) throw InputError("cannot write " + out.manifest_file);
  mf << manifest_json(spec, e, names) << '\n';
  return out;
}

} // namespace

unsigned worker_slots()
{
  if (char const* env = std::getenv("SPDPEG_THREADS")) {
    char* end = nullptr;
    long const v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string manifest_json(const RunSpec& spec, const Experiment& e, const std::vector<std::string>& trace_names)
{
  auto const probe = make_config(e, spec.settings, spec.seeds.empty() ? 0 : spec.seeds.front());
  auto const sched = Schedule::from_config(probe, e.problem);

  json j;
  j["manifest_version"] = kManifestVersion;
  j["experiment"] = experiment_to_json(spec.experiment);
  std::vector<std::string> solvers;
  for (auto s : spec.solvers) solvers.push_back(to_string(s));
  j["solvers"] = solvers;
  j["seeds"] = spec.seeds;
  j["settings"] = {{"gamma", spec.settings.gamma},
                   {"regime", to_string(spec.settings.regime)},
                   {"iters", spec.settings.iters},
                   {"batch_size", spec.settings.batch_size},
                   {"eval_every", spec.settings.eval_every},
                   {"step_scale", spec.settings.step_scale}};
  j["wall_time"] = spec.wall_time;
  j["derived"] = {{"n_train", e.train.size()},
                  {"n_test", e.test.size()},
                  {"dimension", e.problem.dimension()},
                  {"penalty", e.penalty_source},
                  {"penalty_rows", e.problem.dual_dimension()},
                  {"penalty_nnz", e.problem.penalty.nnz()},
                  {"r1", {{"kind", to_string(e.problem.r1.kind)}, {"weight", e.problem.r1.weight}}},
                  {"r2", {{"kind", to_string(e.problem.r2.kind)}, {"weight", e.problem.r2.weight}}},
                  {"folded_l2", e.problem.folded_l2},
                  {"mu", e.problem.strong_convexity_mu},
                  {"L_hat", e.lipschitz_L},
                  {"sigma_max", e.sigma_max},
                  {"schedule",
                   {{"regime", to_string(sched.regime)}, {"mu", sched.mu}, {"L_tilde", sched.L_tilde},
                    {"horizon", sched.horizon}}}};
  j["traces"] = trace_names;
  return j.dump(2);
}

RunSpec parse_manifest(const std::string& json_text)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw InputError(std::string("manifest: ") + ex.what());
  }
  try {
    if (j.at("manifest_version").get<int>() != kManifestVersion) throw InputError("manifest: unsupported version");
    RunSpec s;
    s.experiment = experiment_from_json(j.at("experiment"));
    s.solvers.clear();
    for (auto const& name : j.at("solvers")) s.solvers.push_back(parse_solver_name(name.get<std::string>()));
    s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    auto const& st = j.at("settings");
    s.settings.gamma = st.at("gamma").get<double>();
    s.settings.regime = parse_regime(st.at("regime").get<std::string>());
    s.settings.iters = st.at("iters").get<std::uint64_t>();
    s.settings.batch_size = st.at("batch_size").get<std::size_t>();
    s.settings.eval_every = st.at("eval_every").get<std::uint64_t>();
    s.settings.step_scale = st.at("step_scale").get<double>();
    s.wall_time = j.at("wall_time").get<bool>();
    return s;
  } catch (const json::exception& ex) {
    throw InputError(std::string("manifest: ") + ex.what());
  }
}

RunOutcome cmd_run(const RunSpec& spec, std::ostream& log)
{
  auto const e = build_experiment(spec.experiment);
  return execute(spec, e, log);
}

RunOutcome cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& log)
{
  auto const text = read_file(manifest_path);
  RunSpec spec = parse_manifest(text);
  spec.out_dir = out_dir;
  auto const e = build_experiment(spec.experiment);

  auto const recorded = json::parse(text).at("derived");
  if (recorded.at("L_hat").get<double>() != e.lipschitz_L || recorded.at("sigma_max").get<double>() != e.sigma_max)
    throw InputError("manifest: recomputed L_hat or sigma_max differs from the recorded value");
  return execute(spec, e, log);
}

// ---------------------------------------------------------------------------

RegimeCurve regime_curve(const Experiment& e,
                         const RunSettings& settings,
                         std::size_t seeds,
                         double reference_objective,
                         std::size_t per_decade)
{
  RegimeCurve c;
  c.iterations = log_checkpoints(settings.iters, per_decade);
  std::size_t const m = c.iterations.size();
  c.per_seed_gap.assign(seeds, std::vector<double>(m));
  std::vector<std::vector<double>> feas(seeds, std::vector<double>(m));

  parallel_for(seeds, [&](std::size_t s) {
    auto const cfg = make_config(e, settings, s);
    SpdpegSolver solver(e.problem, e.train, cfg);
    std::size_t next = 0;
    for (std::uint64_t n = 1; n <= settings.iters; ++n) {
      solver.step();
      if (n == c.iterations[next]) {
        auto const avg = solver.current_averages();
        c.per_seed_gap[s][next] = composite_objective(e.problem, e.train, avg.x) - reference_objective;
        Vector const fx = matvec(e.problem.penalty, avg.x);
        feas[s][next] = std::sqrt(squared_distance(fx, avg.z));
        ++next;
      }
    }
  });

  c.mean_gap.assign(m, 0.0);
  c.mean_feas.assign(m, 0.0);
  for (std::size_t s = 0; s < seeds; ++s)
    for (std::size_t i = 0; i < m; ++i) {
      c.mean_gap[i] += c.per_seed_gap[s][i] / static_cast<double>(seeds);
      c.mean_feas[i] += feas[s][i] / static_cast<double>(seeds);
    }
  return c;
}

RateReport cmd_verify_rates(const RateSpec& spec, std::ostream& log)
{
  RateReport r;
  auto print_fit = [&](const char* name, const RateFit& f, double max_slope, bool ok) {
    log << name << ": slope=" << g17(f.slope) << " r2=" << g17(f.r_squared) << " window=[" << f.window.first << ","
        << f.window.second << "] points=" << f.points << " (need slope<=" << max_slope
        << " r2>=" << spec.min_r_squared << ") " << (ok ? "PASS" : "FAIL") << '\n';
  };

  // Convex regime on fused logistic regression.
  {
    ExperimentSpec es;
    es.task = Task::FLR;
    es.synthetic = spec.convex_instance;
    es.normalize = spec.normalize;
    auto const e = build_experiment(es);
    auto const ref = reference_optimum(e.problem, e.train, spec.reference);
    r.convex_reference = ref.objective;
    log << "convex reference: objective=" << g17(ref.objective) << " iterations=" << ref.iterations
        << " residual=" << g17(ref.residual) << (ref.converged ? "" : " (not converged)") << '\n';
    RunSettings st;
    st.gamma = spec.gamma;
    st.regime = Regime::Convex;
    st.iters = spec.convex_iters;
    auto const curve = regime_curve(e, st, spec.seeds, ref.objective, spec.checkpoints_per_decade);
    try {
      r.convex_fit = fit_rate(curve.iterations, curve.mean_gap, spec.window_lo, spec.convex_iters);
      r.convex_ok = r.convex_fit.slope <= spec.convex_max_slope && r.convex_fit.r_squared >= spec.min_r_squared;
    } catch (const InputError& ex) {
      log << "convex fit failed: " << ex.what() << '\n';
    }
    print_fit("convex objective gap", r.convex_fit, spec.convex_max_slope, r.convex_ok);
  }

  // Strongly convex regimes on graph-guided logistic regression.
  {
    ExperimentSpec es;
    es.task = Task::GGRLR;
    es.synthetic = spec.sc_instance;
    es.normalize = spec.normalize;
    es.gamma_reg = spec.sc_mu;
    auto const e = build_experiment(es);
    auto const ref = reference_optimum(e.problem, e.train, spec.reference);
    r.sc_reference = ref.objective;
    log << "strongly convex reference: objective=" << g17(ref.objective) << " iterations=" << ref.iterations
        << " residual=" << g17(ref.residual) << (ref.converged ? "" : " (not converged)") << '\n';

    RunSettings st;
    st.gamma = spec.gamma;
    st.regime = Regime::SCNonUniform;
    st.iters = spec.sc_iters;
    auto const curve = regime_curve(e, st, spec.seeds, ref.objective, spec.checkpoints_per_decade);
    bool obj_ok = false, feas_ok = false;
    try {
      r.sc_fit = fit_rate(curve.iterations, curve.mean_gap, spec.window_lo, spec.sc_iters);
      obj_ok = r.sc_fit.slope <= spec.sc_max_slope && r.sc_fit.r_squared >= spec.min_r_squared;
    } catch (const InputError& ex) {
      log << "sc objective fit failed: " << ex.what() << '\n';
    }
    try {
      r.sc_feasibility_fit = fit_rate(curve.iterations, curve.mean_feas, spec.window_lo, spec.sc_iters);
      feas_ok = r.sc_feasibility_fit.slope <= spec.sc_max_slope &&
                r.sc_feasibility_fit.r_squared >= spec.min_r_squared;
    } catch (const InputError& ex) {
      log << "sc feasibility fit failed: " << ex.what() << '\n';
    }
    r.sc_ok = obj_ok && feas_ok;
    print_fit("sc-nonuniform objective gap", r.sc_fit, spec.sc_max_slope, obj_ok);
    print_fit("sc-nonuniform feasibility gap", r.sc_feasibility_fit, spec.sc_max_slope, feas_ok);

    RunSettings ord = st;
    ord.iters = spec.ordering_iters;
    auto const nonuni = regime_curve(e, ord, spec.seeds, ref.objective, 1);
    ord.regime = Regime::SCUniform;
    auto const uni = regime_curve(e, ord, spec.seeds, ref.objective, 1);
    std::vector<double> gu, gn;
    for (std::size_t s = 0; s < spec.seeds; ++s) {
      gu.push_back(uni.per_seed_gap[s].back());
      gn.push_back(nonuni.per_seed_gap[s].back());
    }
    r.uniform_gap_median = median(gu);
    r.nonuniform_gap_median = median(gn);
    r.ordering_ok = r.uniform_gap_median >= r.nonuniform_gap_median;
    log << "ordering at t=" << spec.ordering_iters << ": sc-uniform median gap=" << g17(r.uniform_gap_median)
        << " mean=" << g17(uni.mean_gap.back()) << ", sc-nonuniform median gap=" << g17(r.nonuniform_gap_median)
        << " mean=" << g17(nonuni.mean_gap.back()) << ' ' << (r.ordering_ok ? "PASS" : "FAIL") << '\n';
  }
  return r;
}

// ---------------------------------------------------------------------------

Lemma1Summary cmd_check_lemma1(const Lemma1Spec& spec, std::ostream& log)
{
  if (spec.references < 1 || spec.steps < 1) throw InputError("check-lemma1: need at least one step and reference");
  ExperimentSpec es;
  es.task = spec.task;
  es.synthetic = spec.instance;
  auto const e = build_experiment(es);
  if (e.problem.dimension() > 50 || e.train.size() > 200)
    log << "warning: instance is larger than the intended d <= 50, N <= 200\n";

  RunSettings st;
  st.gamma = spec.gamma;
  st.regime = spec.regime;
  st.iters = spec.steps;
  st.eval_every = spec.steps;
  st.step_scale = spec.step_scale;
  auto cfg = make_config(e, st, spec.seed);
  cfg.full_batch = spec.deterministic;

  std::size_t const d = e.problem.dimension();
  std::size_t const l = e.problem.dual_dimension();
  RandomState ref_rng = RandomState(spec.seed).split(0x1e33a1);
  std::vector<Lemma1Reference> refs(spec.references);
  for (auto& ref : refs) {
    ref.z.resize(l);
    ref.x.resize(d);
    ref.lambda.resize(l);
    for (auto& v : ref.z) v = ref_rng.normal();
    for (auto& v : ref.x) v = ref_rng.normal();
    for (auto& v : ref.lambda) v = ref_rng.normal();
    if (e.problem.feasible_radius) project_ball(ref.x, *e.problem.feasible_radius);
  }

  Lemma1Summary sum;
  SpdpegSolver solver(e.problem, e.train, cfg);
  StepCapture cap;
  for (std::uint64_t k = 0; k < spec.steps; ++k) {
    SolverState const before = solver.state();
    try {
      solver.step(&cap);
    } catch (const DivergenceError& ex) {
      sum.diverged_at = ex.iteration();
      break;
    }
    ++sum.steps_run;
    bool negative = false;
    for (auto const& ref : refs) {
      auto const rep = check_lemma1(before, solver.state(), e.problem, cfg, ref, cap);
      sum.min_relative_slack = std::min(sum.min_relative_slack, rep.relative_slack);
      sum.min_slack = std::min(sum.min_slack, rep.slack);
      negative = negative || rep.coefficient_negative;
      ++sum.checks;
    }
    if (negative) ++sum.negative_coefficient_steps;
  }
  sum.ok = !sum.diverged_at && sum.min_relative_slack >= -spec.tolerance;
  if (sum.diverged_at) log << "iterates diverged at iteration " << *sum.diverged_at << "; checking stopped\n";
  log << "mode=" << (spec.deterministic ? "deterministic" : "stochastic") << " steps=" << sum.steps_run
      << " references=" << spec.references << " checks=" << sum.checks
      << " min_slack=" << g17(sum.min_slack) << " min_relative_slack=" << g17(sum.min_relative_slack)
      << " negative_coefficient_steps=" << sum.negative_coefficient_steps << ' ' << (sum.ok ? "PASS" : "FAIL")
      << '\n';
  return sum;
}

// ---------------------------------------------------------------------------

std::vector<PlotSummaryRow> cmd_plotdata(const std::string& pattern, const std::string& out_file, std::ostream& log)
{
  glob_t g{};
  int const rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> files;
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) files.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  if (files.empty()) throw InputError("plotdata: no trace matches '" + pattern + "'");

  static const std::regex name_re(R"(trace_(.+)_seed([0-9]+)\.csv)");
  static const char* metrics[] = {"objective", "test_loss", "accuracy", "feasibility_gap", "max_dual_norm",
                                  "wall_seconds"};

  struct Key
  {
    std::string solver;
    std::string metric;
    std::uint64_t iteration;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::vector<double>> groups;

  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw InputError("cannot write " + out_file);
  out << "solver,metric,iteration,seed,value\n";
  for (auto const& path : files) {
    std::smatch m;
    std::string const base = fs::path(path).filename().string();
    if (!std::regex_match(base, m, name_re))
      throw InputError("plotdata: cannot read solver and seed from file name '" + base + "'");
    std::string const solver = m[1];
    std::string const seed = m[2];
    for (auto const& r : read_trace_csv_file(path)) {
      double const values[] = {r.objective, r.test_loss, r.accuracy, r.feasibility_gap, r.max_dual_norm,
                               r.wall_seconds};
      for (std::size_t i = 0; i < std::size(metrics); ++i) {
        out << solver << ',' << metrics[i] << ',' << r.iteration << ',' << seed << ',' << g17(values[i]) << '\n';
        groups[{solver, metrics[i], r.iteration}].push_back(values[i]);
      }
    }
  }

  std::vector<PlotSummaryRow> rows;
  for (auto const& [key, vals] : groups) {
    PlotSummaryRow row{key.solver, key.metric, key.iteration, vals.size(), 0.0, 0.0};
    for (double v : vals) row.mean += v;
    row.mean /= static_cast<double>(vals.size());
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - row.mean) * (v - row.mean);
      row.stderr_ = std::sqrt(ss / static_cast<double>(vals.size() - 1) / static_cast<double>(vals.size()));
    }
    rows.push_back(row);
  }

  fs::path const op(out_file);
  auto const summary = (op.parent_path() / (op.stem().string() + "_summary" + op.extension().string())).string();
  std::ofstream so(summary, std::ios::binary);
  if (!so) throw InputError("cannot write " + summary);
  so << "solver,metric,iteration,n,mean,stderr\n";
  for (auto const& r : rows)
    so << r.solver << ',' << r.metric << ',' << r.iteration << ',' << r.n << ',' << g17(r.mean) << ','
       << g17(r.stderr_) << '\n';
  log << "read " << files.size() << " traces; wrote " << out_file << " and " << summary << '\n';
  return rows;
}

} // namespace spdpeg::bench
