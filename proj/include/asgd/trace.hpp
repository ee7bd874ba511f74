#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace asgd {

struct TraceRow {
  std::uint64_t t = 0;
  std::uint64_t t_prime = 0;  // cumulative single-coordinate writes
  double loss = 0.0;
  double dist_sq = std::numeric_limits<double>::quiet_NaN();  // |w_t - w*|^2
  double wall_seconds = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::uint64_t seed = 0;
  bool inconsistent_reads = false;  // parallel-mode snapshots
};

}  // namespace asgd
