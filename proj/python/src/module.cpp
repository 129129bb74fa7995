#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spdpeg/baselines.hpp"
#include "spdpeg/bench/commands.hpp"
#include "spdpeg/bench/experiment.hpp"
#include "spdpeg/data_io.hpp"
#include "spdpeg/loss.hpp"
#include "spdpeg/penalty.hpp"
#include "spdpeg/prox.hpp"
#include "spdpeg/schedule.hpp"
#include "spdpeg/solver.hpp"

namespace py = pybind11;
using namespace spdpeg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_array(const Vector& v)
{
  return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

Vector to_vector(const Array& a)
{
  if (a.ndim() != 1) throw InputError("expected a 1-D array");
  return Vector(a.data(), a.data() + a.size());
}

py::dict trace_row(const TraceRecord& r)
{
  py::dict d;
  d["iteration"] = r.iteration;
  d["wall_seconds"] = r.wall_seconds;
  d["objective"] = r.objective;
  d["test_loss"] = r.test_loss;
  d["accuracy"] = r.accuracy;
  d["feasibility_gap"] = r.feasibility_gap;
  d["max_dual_norm"] = r.max_dual_norm;
  return d;
}

py::dict run_result(const RunResult& r)
{
  py::dict d;
  d["x"] = to_array(r.averages.x);
  d["z"] = to_array(r.averages.z);
  d["lambda"] = to_array(r.averages.lambda);
  d["iterates"] = r.averages.iterates;
  py::list trace;
  for (auto const& t : r.trace) trace.append(trace_row(t));
  d["trace"] = trace;
  d["final_x"] = to_array(r.final_state.x);
  return d;
}

// dense (n, d) array and +-1 labels
Dataset dataset_from_dense(const Array& features,
                           const Array& labels)
{
  if (features.ndim() != 2 || labels.ndim() != 1 || features.shape(0) != labels.shape(0))
    throw InputError("features must be (n, d) and labels (n,)");
  Dataset data;
  data.dimension = static_cast<std::size_t>(features.shape(1));
  auto f = features.unchecked<2>();
  auto l = labels.unchecked<1>();
  for (py::ssize_t i = 0; i < features.shape(0); ++i) {
    Sample s;
    s.label = l(i);
    for (py::ssize_t j = 0; j < features.shape(1); ++j)
      if (f(i, j) != 0.0) s.features.emplace_back(static_cast<std::uint32_t>(j), f(i, j));
    data.samples.push_back(std::move(s));
  }
  data.validate();
  return data;
}

py::array_t<double> dense_features(const Dataset& data)
{
  py::array_t<double> a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(data.size()), static_cast<py::ssize_t>(data.dimension)});
  auto m = a.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < m.shape(0); ++i)
    for (py::ssize_t j = 0; j < m.shape(1); ++j) m(i, j) = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    for (auto const& [j, v] : data.samples[i].features) m(static_cast<py::ssize_t>(i), j) = v;
  return a;
}

} // namespace

PYBIND11_MODULE(_spdpeg, m)
{
  m.doc() = "Stochastic primal-dual proximal extra-gradient solver for l(x) + r1(x) + r2(F x).";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::enum_<LossKind>(m, "LossKind").value("Logistic", LossKind::Logistic).value("LeastSquares", LossKind::LeastSquares);
  py::enum_<RegKind>(m, "RegKind")
    .value("None_", RegKind::None)
    .value("L1", RegKind::L1)
    .value("SquaredL2", RegKind::SquaredL2);
  py::enum_<Regime>(m, "Regime")
    .value("Convex", Regime::Convex)
    .value("SCUniform", Regime::SCUniform)
    .value("SCNonUniform", Regime::SCNonUniform);

  // prox ---------------------------------------------------------------------
  py::class_<ProxSpec>(m, "ProxSpec")
    .def(py::init([](RegKind kind, double weight) { return ProxSpec{kind, weight}; }), py::arg("kind") = RegKind::None,
         py::arg("weight") = 0.0)
    .def_readwrite("kind", &ProxSpec::kind)
    .def_readwrite("weight", &ProxSpec::weight)
    .def("__repr__", [](const ProxSpec& p) { return "ProxSpec(" + to_string(p.kind) + ", " + std::to_string(p.weight) + ")"; });

  m.def("prox_l1", [](const Array& v, double t) { return to_array(prox_l1(to_vector(v), t)); }, py::arg("v"),
        py::arg("threshold"));
  m.def(
    "prox_squared_l2", [](const Array& v, double w, double step) { return to_array(prox_squared_l2(to_vector(v), w, step)); },
    py::arg("v"), py::arg("weight"), py::arg("step"));
  m.def(
    "apply_prox", [](const ProxSpec& s, const Array& v, double step) { return to_array(apply_prox(s, to_vector(v), step)); },
    py::arg("spec"), py::arg("v"), py::arg("step"));
  m.def(
    "regularizer_value", [](const ProxSpec& s, const Array& v) { return regularizer_value(s, to_vector(v)); },
    py::arg("spec"), py::arg("v"));

  // data ---------------------------------------------------------------------
  py::class_<Dataset>(m, "Dataset")
    .def_static("from_dense", &dataset_from_dense, py::arg("features"), py::arg("labels"))
    .def_property_readonly("dimension", [](const Dataset& d) { return d.dimension; })
    .def("__len__", &Dataset::size)
    .def("features", &dense_features, "Dense (n, d) copy of the features.")
    .def("labels", [](const Dataset& d) {
      Vector l;
      for (auto const& s : d.samples) l.push_back(s.label);
      return to_array(l);
    })
    .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  m.def("parse_libsvm", &parse_libsvm_string, py::arg("text"), py::arg("min_dimension") = 0);
  m.def("load_libsvm", &load_libsvm_file, py::arg("path"), py::arg("min_dimension") = 0);
  m.def("to_libsvm", &to_libsvm_string, py::arg("data"));
  m.def(
    "split",
    [](const Dataset& d, double fraction, std::uint64_t seed) { return split(d, {fraction, seed}); },
    py::arg("data"), py::arg("train_fraction") = 0.8, py::arg("seed") = 0);
  m.def(
    "synthesize",
    [](const std::string& spec) {
      auto p = synthesize(SyntheticSpec::parse(spec));
      py::dict d;
      d["data"] = p.data;
      d["ground_truth"] = to_array(p.ground_truth);
      if (p.graph) {
        py::list edges;
        for (auto const& e : p.graph->edges) edges.append(py::make_tuple(e.i, e.j, e.weight));
        d["edges"] = edges;
      }
      return d;
    },
    py::arg("spec"), "spec like 'fused-signal:d=20,n=200,noise=0.1,seed=1'");

  // penalty ------------------------------------------------------------------
  py::class_<SparseMatrix>(m, "SparseMatrix")
    .def_static(
      "from_triplets",
      [](std::size_t rows, std::size_t cols, const std::vector<std::tuple<std::size_t, std::size_t, double>>& t) {
        std::vector<SparseMatrix::Triplet> ts;
        for (auto const& [r, c, v] : t) ts.push_back({r, c, v});
        return SparseMatrix::from_triplets(rows, cols, std::move(ts));
      },
      py::arg("n_rows"), py::arg("n_cols"), py::arg("triplets"))
    .def_static("identity", &SparseMatrix::identity)
    .def_property_readonly("shape", [](const SparseMatrix& s) { return py::make_tuple(s.n_rows(), s.n_cols()); })
    .def_property_readonly("nnz", &SparseMatrix::nnz)
    .def("matvec", [](const SparseMatrix& s, const Array& v) { return to_array(matvec(s, to_vector(v))); })
    .def("rmatvec", [](const SparseMatrix& s, const Array& v) { return to_array(matvec_transpose(s, to_vector(v))); })
    .def("sigma_max", [](const SparseMatrix& s) { return power_iteration_sigma_max(s); },
         "Largest eigenvalue of F^T F by power iteration.");

  m.def("fused_matrix", &build_fused_matrix, py::arg("d"));
  m.def(
    "graph_matrix",
    [](std::size_t d, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
      GraphSpec g;
      g.dimension = d;
      for (auto const& [i, j, w] : edges) g.edges.push_back({i, j, w});
      return build_graph_matrix(g);
    },
    py::arg("d"), py::arg("edges"));
  m.def(
    "precision_graph",
    [](const Dataset& d, double ridge, double threshold) {
      py::list edges;
      for (auto const& e : precision_graph_from_data(d, ridge, threshold).edges) edges.append(py::make_tuple(e.i, e.j, e.weight));
      return edges;
    },
    py::arg("data"), py::arg("ridge") = 1e-2, py::arg("threshold") = 1e-3);

  // problem and config -------------------------------------------------------
  py::class_<Problem>(m, "Problem")
    .def(py::init([](const SparseMatrix& F, LossKind loss, ProxSpec r1, ProxSpec r2, double folded_l2) {
           Problem p;
           p.penalty = F;
           p.loss = loss;
           p.r1 = r1;
           p.r2 = r2;
           p.folded_l2 = folded_l2;
           p.strong_convexity_mu = folded_l2;
           return p;
         }),
         py::arg("penalty"), py::arg("loss") = LossKind::Logistic, py::arg("r1") = ProxSpec{},
         py::arg("r2") = ProxSpec{RegKind::L1, 0.0}, py::arg("folded_l2") = 0.0)
    .def_readwrite("loss", &Problem::loss)
    .def_readwrite("r1", &Problem::r1)
    .def_readwrite("r2", &Problem::r2)
    .def_readwrite("folded_l2", &Problem::folded_l2)
    .def_readwrite("strong_convexity_mu", &Problem::strong_convexity_mu)
    .def_readwrite("feasible_radius", &Problem::feasible_radius)
    .def_readonly("penalty", &Problem::penalty)
    .def("objective", [](const Problem& p, const Dataset& d, const Array& x) {
      return composite_objective(p, d, to_vector(x));
    })
    .def("loss_value", [](const Problem& p, const Dataset& d, const Array& x) { return loss_value(p, d, to_vector(x)); })
    .def("gradient",
         [](const Problem& p, const Dataset& d, const Array& x) { return to_array(full_gradient(p, d, to_vector(x))); })
    .def("lipschitz", [](const Problem& p, const Dataset& d) { return problem_lipschitz(p, d); });

  py::class_<SolverConfig>(m, "SolverConfig")
    .def(py::init<>())
    .def_readwrite("gamma", &SolverConfig::gamma)
    .def_readwrite("regime", &SolverConfig::regime)
    .def_readwrite("max_iters", &SolverConfig::max_iters)
    .def_readwrite("seed", &SolverConfig::seed)
    .def_readwrite("batch_size", &SolverConfig::batch_size)
    .def_readwrite("eval_every", &SolverConfig::eval_every)
    .def_readwrite("lipschitz_L", &SolverConfig::lipschitz_L)
    .def_readwrite("sigma_max_FtF", &SolverConfig::sigma_max_FtF)
    .def_readwrite("full_batch", &SolverConfig::full_batch)
    .def_readwrite("step_scale", &SolverConfig::step_scale)
    .def_static(
      "for_problem",
      [](const Problem& p, const Dataset& d, Regime regime, double gamma) {
        SolverConfig c;
        c.regime = regime;
        c.gamma = gamma;
        c.lipschitz_L = problem_lipschitz(p, d);
        c.sigma_max_FtF = power_iteration_sigma_max(p.penalty);
        return c;
      },
      py::arg("problem"), py::arg("data"), py::arg("regime") = Regime::Convex, py::arg("gamma") = 1.0,
      "Config with L and sigma_max(F^T F) computed from the problem.");

  m.def("compute_L_tilde", &compute_L_tilde, py::arg("gamma"), py::arg("sigma_max"), py::arg("lipschitz_L"), py::arg("mu"));
  m.def(
    "step_size",
    [](Regime regime, double mu, double L_tilde, std::uint64_t k) { return step_size(Schedule{regime, mu, L_tilde, 0}, k); },
    py::arg("regime"), py::arg("mu"), py::arg("L_tilde"), py::arg("k"));
  m.def(
    "average_weight",
    [](Regime regime, std::uint64_t k, std::uint64_t t) { return average_weight(Schedule{regime, 1.0, 1.0, t}, k, t); },
    py::arg("regime"), py::arg("k"), py::arg("t"));

  // solvers ------------------------------------------------------------------
  m.def(
    "run",
    [](const Problem& p, const Dataset& train, const Dataset& test, const SolverConfig& c, const std::string& solver) {
      RunResult r;
      {
        py::gil_scoped_release release;
        r = run_solver(parse_solver_name(solver), p, train, test, c);
      }
      return run_result(r);
    },
    py::arg("problem"), py::arg("train"), py::arg("test"), py::arg("config"), py::arg("solver") = "spdpeg",
    "Runs 'spdpeg', 'eg-full' or 'slinadmm'; returns the averaged (x, z, lambda) and the trace.");

  m.def(
    "check_lemma1",
    [](const std::string& task, const std::string& instance, bool deterministic, Regime regime, std::uint64_t steps,
       std::size_t references, double step_scale, std::uint64_t seed) {
      bench::Lemma1Spec s;
      s.task = bench::parse_task(task);
      s.instance = SyntheticSpec::parse(instance);
      s.deterministic = deterministic;
      s.regime = regime;
      s.steps = steps;
      s.references = references;
      s.step_scale = step_scale;
      s.seed = seed;
      std::ostringstream log;
      auto const r = bench::cmd_check_lemma1(s, log);
      py::dict d;
      d["min_relative_slack"] = r.min_relative_slack;
      d["min_slack"] = r.min_slack;
      d["checks"] = r.checks;
      d["negative_coefficient_steps"] = r.negative_coefficient_steps;
      d["steps_run"] = r.steps_run;
      d["ok"] = r.ok;
      return d;
    },
    py::arg("task") = "flr", py::arg("instance") = "fused-signal:d=20,n=125,noise=0.1,seed=3",
    py::arg("deterministic") = false, py::arg("regime") = Regime::Convex, py::arg("steps") = 1000,
    py::arg("references") = 10, py::arg("step_scale") = 1.0, py::arg("seed") = 0);
}
