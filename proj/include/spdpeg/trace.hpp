#pragma once

#include <cstdint>

namespace spdpeg {

/// Periodic snapshot of a run, evaluated at the running average.
struct TraceRecord
{
  std::uint64_t iteration = 0;
  double wall_seconds = 0.0;
  double objective = 0.0;       // l + r1 + r2(F x~) on the training split
  double test_loss = 0.0;       // data loss on the test split
  double accuracy = 0.0;        // on the test split
  double feasibility_gap = 0.0; // |F x~ - z~|
  double max_dual_norm = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

} // namespace spdpeg
