#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "spdpeg/core.hpp"
#include "spdpeg/penalty.hpp"

namespace spdpeg {

/// Reads LIBSVM text: "label idx:val idx:val ...", 1-based strictly
/// increasing indices. Labels > 0 map to +1, everything else to -1. The
/// dimension is the largest index seen. Blank lines are skipped; LF or CRLF.
/// Throws ParseError with the offending line number.
/// `min_dimension` lets a caller keep trailing all-zero features.
Dataset parse_libsvm(std::istream& in, std::size_t min_dimension = 0);
Dataset parse_libsvm_string(const std::string& text, std::size_t min_dimension = 0);
Dataset load_libsvm_file(const std::string& path, std::size_t min_dimension = 0);

/// Inverse of parse_libsvm (round-trips exactly; values printed with 17
/// significant digits).
void write_libsvm(std::ostream& out, const Dataset& data);
std::string to_libsvm_string(const Dataset& data);

struct SplitSpec
{
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

/// Seeded shuffle then cut at round(fraction N) (half rounds up). Both parts
/// must be nonempty.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Scales every feature so its max absolute value is 1 (all-zero features
/// are left alone). Returns the per-feature scale applied.
Vector normalize_max_abs(Dataset& data);

enum class SyntheticKind { FusedSignal, GraphLogistic };

std::string to_string(SyntheticKind);
SyntheticKind parse_synthetic_kind(const std::string&);

struct SyntheticSpec
{
  SyntheticKind kind = SyntheticKind::FusedSignal;
  std::size_t d = 20;
  std::size_t n = 200;
  double noise = 0.1;
  std::uint64_t seed = 1;

  /// "fused-signal:d=20,n=200,noise=0.1,seed=1"; keys optional.
  static SyntheticSpec parse(const std::string& text);
  std::string to_string() const;
};

struct SyntheticProblem
{
  Dataset data;
  std::optional<GraphSpec> graph; // set for graph-logistic
  Vector ground_truth;
};

/// Gaussian features, labels sign(a^T x* + noise g) with sign(0) = +1.
/// fused-signal: x* has 3 constant segments with distinct values.
/// graph-logistic: x* is constant on each connected component of a random
/// graph (some components zero); the graph is returned.
SyntheticProblem synthesize(const SyntheticSpec& spec);

} // namespace spdpeg
