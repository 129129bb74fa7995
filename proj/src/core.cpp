#include "spdpeg/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spdpeg {

double dot(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) throw InputError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) throw InputError("squared_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double const d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

bool all_finite(std::span<const double> a)
{
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

void Dataset::validate() const
{
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto const& s = samples[i];
    if (s.label != 1.0 && s.label != -1.0)
      throw InputError("dataset: sample " + std::to_string(i) + " has label outside {-1,+1}");
    for (std::size_t p = 0; p < s.features.size(); ++p) {
      if (s.features[p].first >= dimension)
        throw InputError("dataset: sample " + std::to_string(i) + " has feature index beyond dimension");
      if (p > 0 && s.features[p].first <= s.features[p - 1].first)
        throw InputError("dataset: sample " + std::to_string(i) + " has unsorted feature indices");
    }
  }
}

std::string to_string(LossKind k)
{
  switch (k) {
  case LossKind::Logistic: return "logistic";
  case LossKind::LeastSquares: return "least-squares";
  }
  return "?";
}

std::string to_string(RegKind k)
{
  switch (k) {
  case RegKind::None: return "none";
  case RegKind::L1: return "l1";
  case RegKind::SquaredL2: return "squared-l2";
  }
  return "?";
}

std::string to_string(Regime r)
{
  switch (r) {
  case Regime::Convex: return "convex";
  case Regime::SCUniform: return "sc-uniform";
  case Regime::SCNonUniform: return "sc-nonuniform";
  }
  return "?";
}

LossKind parse_loss_kind(const std::string& s)
{
  if (s == "logistic") return LossKind::Logistic;
  if (s == "least-squares") return LossKind::LeastSquares;
  throw InputError("unknown loss kind '" + s + "'");
}

RegKind parse_reg_kind(const std::string& s)
{
  if (s == "none") return RegKind::None;
  if (s == "l1") return RegKind::L1;
  if (s == "squared-l2") return RegKind::SquaredL2;
  throw InputError("unknown regularizer kind '" + s + "'");
}

Regime parse_regime(const std::string& s)
{
  if (s == "convex") return Regime::Convex;
  if (s == "sc-uniform") return Regime::SCUniform;
  if (s == "sc-nonuniform") return Regime::SCNonUniform;
  throw InputError("unknown regime '" + s + "'");
}

namespace {

void check_prox_spec(const ProxSpec& spec, const char* name)
{
  if (!std::isfinite(spec.weight) || spec.weight < 0.0)
    throw InputError(std::string("problem: ") + name + " weight must be finite and >= 0");
}

} // namespace

void Problem::validate(const Dataset& data) const
{
  if (data.empty()) throw InputError("problem: dataset is empty");
  if (penalty.n_cols() != data.dimension)
    throw InputError("problem: penalty has " + std::to_string(penalty.n_cols()) + " columns but data dimension is " +
                     std::to_string(data.dimension));
  check_prox_spec(r1, "r1");
  check_prox_spec(r2, "r2");
  if (r2.kind == RegKind::SquaredL2) throw InputError("problem: r2 must be l1 or none");
  if (!std::isfinite(folded_l2) || folded_l2 < 0.0) throw InputError("problem: folded_l2 must be >= 0");
  if (!std::isfinite(strong_convexity_mu) || strong_convexity_mu < 0.0)
    throw InputError("problem: strong_convexity_mu must be >= 0");
  // Only the folded ridge is a certified source of strong convexity.
  if (strong_convexity_mu > folded_l2)
    throw InputError("problem: strong_convexity_mu exceeds the folded ridge weight; the loss is not provably that "
                     "strongly convex");
  if (feasible_radius && !(*feasible_radius > 0.0)) throw InputError("problem: feasible_radius must be > 0");
}

void SolverConfig::validate(const Problem& problem) const
{
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("config: gamma must be > 0");
  if (batch_size < 1) throw InputError("config: batch_size must be >= 1");
  if (eval_every < 1) throw InputError("config: eval_every must be >= 1");
  if (!(lipschitz_L > 0.0) || !std::isfinite(lipschitz_L)) throw InputError("config: lipschitz_L must be > 0");
  if (!(sigma_max_FtF >= 0.0) || !std::isfinite(sigma_max_FtF)) throw InputError("config: sigma_max_FtF must be >= 0");
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) throw InputError("config: step_scale must be > 0");
  if (regime != Regime::Convex && !(problem.strong_convexity_mu > 0.0))
    throw InputError("config: regime " + to_string(regime) + " requires strong_convexity_mu > 0");
}

double compute_L_tilde(double gamma, double sigma_max, double lipschitz_L, double mu)
{
  if (!(gamma > 0.0)) throw InputError("compute_L_tilde: gamma must be > 0");
  if (sigma_max < 0.0 || lipschitz_L < 0.0 || mu < 0.0) throw InputError("compute_L_tilde: inputs must be >= 0");
  double const dual_branch = 8.0 * gamma * sigma_max + mu;
  double const primal_branch = std::sqrt(8.0 * lipschitz_L * lipschitz_L + gamma * sigma_max) + mu;
  return std::max(dual_branch, primal_branch);
}

double estimate_lipschitz(const Dataset& data, LossKind loss)
{
  if (data.empty()) throw InputError("estimate_lipschitz: dataset is empty");
  double max_sq = 0.0;
  for (auto const& s : data.samples) max_sq = std::max(max_sq, s.squared_norm());
  return loss == LossKind::Logistic ? 0.25 * max_sq : max_sq;
}

double problem_lipschitz(const Problem& problem, const Dataset& data)
{
  return estimate_lipschitz(data, problem.loss) + problem.folded_l2;
}

} // namespace spdpeg
