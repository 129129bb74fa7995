#include "spdpeg/penalty.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

namespace spdpeg {

void GraphSpec::validate() const
{
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto const& e : edges) {
    if (!(e.i < e.j && e.j < dimension))
      throw InputError("graph: edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") must satisfy i < j < d");
    if (!std::isfinite(e.weight) || e.weight == 0.0) throw InputError("graph: edge weights must be finite and nonzero");
    if (!seen.emplace(e.i, e.j).second)
      throw InputError("graph: duplicate edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")");
  }
}

SparseMatrix build_fused_matrix(std::size_t d)
{
  if (d < 2) throw InputError("build_fused_matrix: d must be >= 2");
  std::vector<std::size_t> offsets(d);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  cols.reserve(2 * (d - 1));
  vals.reserve(2 * (d - 1));
  for (std::size_t r = 0; r < d - 1; ++r) {
    offsets[r] = 2 * r;
    cols.push_back(static_cast<std::uint32_t>(r));
    vals.push_back(1.0);
    cols.push_back(static_cast<std::uint32_t>(r + 1));
    vals.push_back(-1.0);
  }
  offsets[d - 1] = 2 * (d - 1);
  return SparseMatrix(d - 1, d, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix build_graph_matrix(const GraphSpec& spec)
{
  spec.validate();
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(2 * spec.edges.size());
  for (std::size_t r = 0; r < spec.edges.size(); ++r) {
    auto const& e = spec.edges[r];
    t.push_back({r, e.i, e.weight});
    t.push_back({r, e.j, -e.weight});
  }
  return SparseMatrix::from_triplets(spec.edges.size(), spec.dimension, std::move(t));
}

GraphSpec precision_graph_from_data(const Dataset& data, double ridge, double threshold)
{
  if (data.size() < 2) throw InputError("precision_graph_from_data: need at least 2 samples");
  if (!(ridge > 0.0)) throw InputError("precision_graph_from_data: ridge must be > 0");
  if (!(threshold > 0.0)) throw InputError("precision_graph_from_data: threshold must be > 0");
  auto const d = static_cast<Eigen::Index>(data.dimension);
  auto const n = static_cast<double>(data.size());

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (auto const& s : data.samples)
    for (auto const& [j, v] : s.features) mean[j] += v;
  mean /= n;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd row(d);
  for (auto const& s : data.samples) {
    row = -mean;
    for (auto const& [j, v] : s.features) row[j] += v;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(row);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= n;
  cov.diagonal().array() += ridge;

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericError("precision_graph_from_data: regularized covariance is singular");
  Eigen::MatrixXd const precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
  if (!precision.allFinite()) throw NumericError("precision_graph_from_data: non-finite precision matrix");

  GraphSpec g;
  g.dimension = data.dimension;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      // Average the two triangles so the result is exactly symmetric.
      double const p = 0.5 * (precision(i, j) + precision(j, i));
      if (std::abs(p) > threshold)
        g.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), std::abs(p)});
    }
  return g;
}

namespace {

[[noreturn]] void penalty_error(std::size_t line, const std::string& what)
{
  throw ParseError(line, "penalty matrix: " + what);
}

std::vector<std::string> split_ws(const std::string& s)
{
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::size_t parse_count(const std::string& tok, std::size_t line)
{
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    penalty_error(line, "expected a non-negative integer, got '" + tok + "'");
  try {
    return static_cast<std::size_t>(std::stoull(tok));
  } catch (const std::exception&) {
    penalty_error(line, "integer out of range '" + tok + "'");
  }
}

double parse_real(const std::string& tok, std::size_t line)
{
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    penalty_error(line, "expected a real value, got '" + tok + "'");
  }
  if (pos != tok.size() || !std::isfinite(v)) penalty_error(line, "expected a finite real value, got '" + tok + "'");
  return v;
}

} // namespace

SparseMatrix read_penalty_matrix(std::istream& in)
{
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    ++lineno;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  };

  if (!next_line(line)) penalty_error(1, "missing header line");
  auto header = split_ws(line);
  if (header.size() != 3) penalty_error(lineno, "header must be 'rows cols nnz'");
  std::size_t const rows = parse_count(header[0], lineno);
  std::size_t const cols = parse_count(header[1], lineno);
  std::size_t const nnz = parse_count(header[2], lineno);

  std::vector<std::size_t> offsets(rows + 1, 0);
  std::vector<std::uint32_t> col_idx;
  std::vector<double> vals;
  col_idx.reserve(nnz);
  vals.reserve(nnz);
  std::size_t prev_row = 0, prev_col = 0;
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!next_line(line)) penalty_error(lineno + 1, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(k));
    auto tok = split_ws(line);
    if (tok.size() != 3) penalty_error(lineno, "entry must be 'row col value'");
    std::size_t const r = parse_count(tok[0], lineno);
    std::size_t const c = parse_count(tok[1], lineno);
    double const v = parse_real(tok[2], lineno);
    if (r >= rows || c >= cols) penalty_error(lineno, "index out of range");
    if (k > 0 && (r < prev_row || (r == prev_row && c <= prev_col)))
      penalty_error(lineno, "entries must be row-major sorted without duplicates");
    prev_row = r;
    prev_col = c;
    offsets[r + 1]++;
    col_idx.push_back(static_cast<std::uint32_t>(c));
    vals.push_back(v);
  }
  while (next_line(line))
    if (line.find_first_not_of(" \t") != std::string::npos) penalty_error(lineno, "trailing content after last entry");
  for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(col_idx), std::move(vals));
}

SparseMatrix read_penalty_matrix_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw InputError("cannot open penalty file '" + path + "'");
  return read_penalty_matrix(in);
}

void write_penalty_matrix(std::ostream& out, const SparseMatrix& m)
{
  out << m.n_rows() << ' ' << m.n_cols() << ' ' << m.nnz() << '\n';
  out << std::setprecision(17);
  for (auto const& t : m.triplets()) out << t.row << ' ' << t.col << ' ' << t.value << '\n';
}

} // namespace spdpeg
