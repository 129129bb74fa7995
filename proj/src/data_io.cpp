#include "spdpeg/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <tuple>

#include "spdpeg/rng.hpp"

namespace spdpeg {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

std::vector<std::string_view> tokenize(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t const start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view tok, double& out)
{
  if (tok.empty()) return false;
  // from_chars rejects a leading '+', which LIBSVM labels commonly use.
  if (tok.front() == '+') {
    tok.remove_prefix(1);
    if (tok.empty() || tok.front() == '-' || tok.front() == '+') return false;
  }
  auto const* first = tok.data();
  auto const* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_index(std::string_view tok, std::uint64_t& out)
{
  if (tok.empty()) return false;
  auto const* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), last, out);
  return ec == std::errc() && ptr == last;
}

} // namespace

Dataset parse_libsvm(std::istream& in, std::size_t min_dimension)
{
  Dataset data;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto const tokens = tokenize(line);
    if (tokens.empty()) continue;

    Sample s;
    double label = 0.0;
    if (!parse_double(tokens[0], label))
      throw ParseError(lineno, "malformed label '" + std::string(tokens[0]) + "'");
    s.label = label > 0.0 ? 1.0 : -1.0;

    std::uint64_t prev = 0;
    s.features.reserve(tokens.size() - 1);
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      auto const tok = tokens[t];
      auto const colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(lineno, "malformed feature token '" + std::string(tok) + "' (expected idx:val)");
      std::uint64_t idx = 0;
      if (!parse_index(tok.substr(0, colon), idx) || idx == 0 || idx > 0xffffffffULL)
        throw ParseError(lineno, "malformed feature index in '" + std::string(tok) + "'");
      double val = 0.0;
      if (!parse_double(tok.substr(colon + 1), val))
        throw ParseError(lineno, "malformed feature value in '" + std::string(tok) + "'");
      if (idx <= prev) throw ParseError(lineno, "feature indices must be strictly increasing");
      prev = idx;
      s.features.emplace_back(static_cast<std::uint32_t>(idx - 1), val);
      max_index = std::max<std::size_t>(max_index, idx);
    }
    data.samples.push_back(std::move(s));
  }
  if (in.bad()) throw InputError("parse_libsvm: read error");
  if (data.samples.empty()) throw ParseError(lineno + 1, "no samples found");
  data.dimension = std::max(max_index, min_dimension);
  return data;
}

Dataset parse_libsvm_string(const std::string& text, std::size_t min_dimension)
{
  std::istringstream in(text);
  return parse_libsvm(in, min_dimension);
}

Dataset load_libsvm_file(const std::string& path, std::size_t min_dimension)
{
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  return parse_libsvm(in, min_dimension);
}

void write_libsvm(std::ostream& out, const Dataset& data)
{
  auto const old = out.precision(17);
  for (auto const& s : data.samples) {
    out << (s.label > 0 ? "+1" : "-1");
    for (auto const& [j, v] : s.features) out << ' ' << (j + 1) << ':' << v;
    out << '\n';
  }
  out.precision(old);
}

std::string to_libsvm_string(const Dataset& data)
{
  std::ostringstream out;
  write_libsvm(out, data);
  return out.str();
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec)
{
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw InputError("split: train_fraction must lie strictly inside (0,1)");
  std::size_t const n = data.size();
  if (n < 2) throw InputError("split: need at least 2 samples");
  auto const n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n) + 0.5));
  if (n_train == 0 || n_train >= n) throw InputError("split: degenerate split (one side would be empty)");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomState rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng.engine());

  Dataset train, test;
  train.dimension = test.dimension = data.dimension;
  train.samples.reserve(n_train);
  test.samples.reserve(n - n_train);
  for (std::size_t k = 0; k < n; ++k) (k < n_train ? train : test).samples.push_back(data.samples[order[k]]);
  return {std::move(train), std::move(test)};
}

Vector normalize_max_abs(Dataset& data)
{
  Vector scale(data.dimension, 0.0);
  for (auto const& s : data.samples)
    for (auto const& [j, v] : s.features) scale[j] = std::max(scale[j], std::abs(v));
  for (auto& s : data.samples)
    for (auto& [j, v] : s.features)
      if (scale[j] > 0.0) v /= scale[j];
  for (auto& c : scale)
    if (c == 0.0) c = 1.0;
  return scale;
}

std::string to_string(SyntheticKind k) { return k == SyntheticKind::FusedSignal ? "fused-signal" : "graph-logistic"; }

SyntheticKind parse_synthetic_kind(const std::string& s)
{
  if (s == "fused-signal") return SyntheticKind::FusedSignal;
  if (s == "graph-logistic") return SyntheticKind::GraphLogistic;
  throw InputError("unknown synthetic kind '" + s + "'");
}

SyntheticSpec SyntheticSpec::parse(const std::string& text)
{
  SyntheticSpec spec;
  auto const colon = text.find(':');
  spec.kind = parse_synthetic_kind(text.substr(0, colon));
  if (colon == std::string::npos) return spec;
  std::istringstream rest(text.substr(colon + 1));
  std::string kv;
  while (std::getline(rest, kv, ',')) {
    auto const eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("synthetic spec: expected key=value, got '" + kv + "'");
    auto const key = kv.substr(0, eq);
    auto const val = kv.substr(eq + 1);
    try {
      if (key == "d") spec.d = std::stoull(val);
      else if (key == "n") spec.n = std::stoull(val);
      else if (key == "noise") spec.noise = std::stod(val);
      else if (key == "seed") spec.seed = std::stoull(val);
      else throw InputError("synthetic spec: unknown key '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const InputError*>(&e)) throw;
      throw InputError("synthetic spec: bad value for '" + key + "'");
    }
  }
  return spec;
}

std::string SyntheticSpec::to_string() const
{
  std::ostringstream out;
  out << spdpeg::to_string(kind) << ":d=" << d << ",n=" << n << ",noise=" << std::setprecision(17) << noise
      << ",seed=" << seed;
  return out.str();
}

namespace {

Dataset gaussian_samples(const Vector& truth, std::size_t n, double noise, RandomState& rng)
{
  Dataset data;
  data.dimension = truth.size();
  data.samples.resize(n);
  for (auto& s : data.samples) {
    s.features.resize(truth.size());
    double margin = 0.0;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      double const a = rng.normal();
      s.features[j] = {static_cast<std::uint32_t>(j), a};
      margin += a * truth[j];
    }
    margin += noise * rng.normal();
    s.label = margin >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

} // namespace

SyntheticProblem synthesize(const SyntheticSpec& spec)
{
  if (spec.d < 2) throw InputError("synthesize: d must be >= 2");
  if (spec.n < 2) throw InputError("synthesize: n must be >= 2");
  if (!(spec.noise >= 0.0)) throw InputError("synthesize: noise must be >= 0");
  RandomState rng(spec.seed);
  SyntheticProblem out;
  out.ground_truth.assign(spec.d, 0.0);

  if (spec.kind == SyntheticKind::FusedSignal) {
    static constexpr double kLevels[3] = {1.0, -1.0, 0.5};
    std::size_t const b1 = std::max<std::size_t>(1, spec.d / 3);
    std::size_t const b2 = std::max(b1 + 1, (2 * spec.d) / 3);
    for (std::size_t j = 0; j < spec.d; ++j) out.ground_truth[j] = kLevels[j < b1 ? 0 : (j < b2 ? 1 : 2)];
  } else {
    std::vector<std::size_t> perm(spec.d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    GraphSpec g;
    g.dimension = spec.d;
    std::size_t pos = 0;
    while (pos < spec.d) {
      std::size_t size = 3 + rng.index(4); // 3..6
      if (spec.d - pos < size + 2) size = spec.d - pos;
      double level = 0.0;
      if (rng.uniform() >= 1.0 / 3.0) level = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.5);
      for (std::size_t k = pos; k < pos + size; ++k) {
        out.ground_truth[perm[k]] = level;
        if (k > pos) g.edges.push_back({std::min(perm[k - 1], perm[k]), std::max(perm[k - 1], perm[k]), 1.0});
      }
      if (size >= 4) {
        // one chord closing a cycle between the ends of the path
        std::size_t const a = perm[pos], b = perm[pos + size - 1];
        g.edges.push_back({std::min(a, b), std::max(a, b), 1.0});
      }
      pos += size;
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const GraphEdge& x, const GraphEdge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
    out.graph = std::move(g);
  }
  out.data = gaussian_samples(out.ground_truth, spec.n, spec.noise, rng);
  return out;
}

} // namespace spdpeg
