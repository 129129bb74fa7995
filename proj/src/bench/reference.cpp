#include "spdpeg/bench/reference.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spdpeg/loss.hpp"
#include "spdpeg/prox.hpp"
#include "spdpeg/solver.hpp"
#include "spdpeg/sparse_matrix.hpp"

namespace spdpeg::bench {

namespace {

struct Fnv
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t n)
  {
    auto const* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
};

// prox of s r* via Moreau: v - s prox_{r/s}(v/s)
void prox_conjugate_inplace(const ProxSpec& spec, std::span<double> v, double s, Vector& work)
{
  work.assign(v.begin(), v.end());
  for (double& e : work) e /= s;
  apply_prox_inplace(spec, work, 1.0 / s);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= s * work[i];
}

std::string cache_path(const std::string& dir, std::uint64_t key)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "ref_%016llx.txt", static_cast<unsigned long long>(key));
  return (std::filesystem::path(dir) / buf).string();
}

std::optional<ReferenceOptimum> load_cached(const std::string& path, std::size_t d)
{
  std::ifstream in(path);
  if (!in) return std::nullopt;
  ReferenceOptimum r;
  std::string tag;
  int converged = 0;
  if (!(in >> tag >> r.objective) || tag != "objective") return std::nullopt;
  if (!(in >> tag >> r.iterations) || tag != "iterations") return std::nullopt;
  if (!(in >> tag >> r.residual) || tag != "residual") return std::nullopt;
  if (!(in >> tag >> converged) || tag != "converged") return std::nullopt;
  r.converged = converged != 0;
  r.x.resize(d);
  for (auto& v : r.x)
    if (!(in >> v)) return std::nullopt;
  return r;
}

void store_cached(const std::string& path, const ReferenceOptimum& r)
{
  std::ofstream out(path);
  if (!out) return;
  char buf[32];
  auto g = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "objective " << g(r.objective) << "\niterations " << r.iterations << "\nresidual " << g(r.residual)
      << "\nconverged " << (r.converged ? 1 : 0) << '\n';
  for (double v : r.x) out << g(v) << '\n';
}

} // namespace

std::uint64_t problem_hash(const Problem& problem, const Dataset& data)
{
  Fnv f;
  f.u64(static_cast<std::uint64_t>(problem.loss));
  f.f64(problem.folded_l2);
  f.u64(static_cast<std::uint64_t>(problem.r1.kind));
  f.f64(problem.r1.weight);
  f.u64(static_cast<std::uint64_t>(problem.r2.kind));
  f.f64(problem.r2.weight);
  f.f64(problem.feasible_radius.value_or(-1.0));
  f.u64(problem.penalty.n_rows());
  f.u64(problem.penalty.n_cols());
  for (auto const& t : problem.penalty.triplets()) {
    f.u64(t.row);
    f.u64(t.col);
    f.f64(t.value);
  }
  f.u64(data.dimension);
  f.u64(data.size());
  for (auto const& s : data.samples) {
    f.f64(s.label);
    f.u64(s.features.size());
    for (auto const& [j, v] : s.features) {
      f.u64(j);
      f.f64(v);
    }
  }
  return f.h;
}

ReferenceOptimum reference_optimum(const Problem& problem, const Dataset& data, const ReferenceOptions& options)
{
  problem.validate(data);
  if (!(options.tol > 0.0)) throw InputError("reference_optimum: tol must be > 0");

  std::string path;
  if (!options.cache_dir.empty()) {
    Fnv f;
    f.u64(problem_hash(problem, data));
    f.f64(options.tol);
    f.u64(options.max_iters);
    path = cache_path(options.cache_dir, f.h);
    if (auto hit = load_cached(path, problem.dimension())) return *hit;
  }

  std::size_t const d = problem.dimension();
  std::size_t const l = problem.dual_dimension();
  auto const& F = problem.penalty;
  double const L = std::max(problem_lipschitz(problem, data), 1e-12);
  double const fnorm2 = l > 0 && F.nnz() > 0 ? power_iteration_sigma_max(F) : 0.0;
  double const s = fnorm2 > 0.0 ? L / (2.0 * fnorm2) : 1.0;
  double const tau = 0.99 / L; // 1/tau - s |F|^2 = L/0.99 - L/2 > L/2

  Vector x(d, 0.0), y(l, 0.0), x_new(d), y_new(l), grad(d), fty(d), fx(l), work;
  ReferenceOptimum r;
  r.residual = INFINITY;
  for (std::uint64_t it = 1; it <= options.max_iters; ++it) {
    full_gradient_into(problem, data, x, grad);
    matvec_transpose_into(F, y, fty);
    for (std::size_t j = 0; j < d; ++j) x_new[j] = x[j] - tau * (grad[j] + fty[j]);
    apply_prox_inplace(problem.r1, x_new, tau);
    if (problem.feasible_radius) project_ball(x_new, *problem.feasible_radius);

    for (std::size_t j = 0; j < d; ++j) grad[j] = 2.0 * x_new[j] - x[j];
    matvec_into(F, grad, fx);
    for (std::size_t i = 0; i < l; ++i) y_new[i] = y[i] + s * fx[i];
    if (l > 0) prox_conjugate_inplace(problem.r2, y_new, s, work);

    double const rx = std::sqrt(squared_distance(x_new, x)) / std::max(1.0, norm(x_new));
    double const ry = l > 0 ? std::sqrt(squared_distance(y_new, y)) / std::max(1.0, norm(y_new)) : 0.0;
    x.swap(x_new);
    y.swap(y_new);
    r.iterations = it;
    r.residual = std::max(rx, ry);
    if (!all_finite(x)) throw NumericError("reference_optimum: iterate became non-finite");
    if (r.residual < options.tol) {
      r.converged = true;
      break;
    }
  }
  r.x = std::move(x);
  r.objective = composite_objective(problem, data, r.x);
  if (!path.empty()) store_cached(path, r);
  return r;
}

} // namespace spdpeg::bench
