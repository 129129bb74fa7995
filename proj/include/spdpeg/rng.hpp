#pragma once

#include <cstdint>
#include <random>

namespace spdpeg {

/// Seedable 64-bit generator. Child streams are derived deterministically
/// from (seed, stream id), so a run is reproducible from its seed alone.
class RandomState
{
public:
  explicit RandomState(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent stream keyed by `stream`; does not advance this generator.
  RandomState split(std::uint64_t stream) const { return RandomState(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL))); }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n)
  {
    return static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_));
  }
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

  bool operator==(const RandomState& o) const { return seed_ == o.seed_ && engine_ == o.engine_; }

private:
  // splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t z)
  {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace spdpeg
