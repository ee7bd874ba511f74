#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace asgd {

// D-way partition of a gradient support into contiguous near-equal slices,
// long slices first. d = min(D, |support|) is the unbiasing multiplier.
struct FilterPartition {
  std::vector<std::uint32_t> support;  // sorted
  int D = 1;
  int d = 1;
  // [first, last) positions into `support` per set.
  std::vector<std::pair<std::size_t, std::size_t>> slices;

  std::span<const std::uint32_t> set(int u) const {
    return {support.data() + slices[u].first,
            slices[u].second - slices[u].first};
  }
};

FilterPartition build_partition(std::vector<std::uint32_t> sorted_support,
                                int D);

struct FilterDraw {
  int u = 0;
  std::size_t first = 0;  // positions into the support list
  std::size_t last = 0;
  int d = 1;
};

// u uniform over {0,...,d-1}. Consumes no randomness when d == 1 so the
// D = 1 engine reduction is stream-exact.
FilterDraw sample_filter(const FilterPartition& p, std::mt19937_64& rng);

// Enumeration check of d E[S|xi] = D_xi: every support coordinate lies in
// exactly one set.
bool verify_unbiased(const FilterPartition& p);
bool verify_unbiased(std::span<const std::uint32_t> support,
                     const std::vector<std::vector<std::uint32_t>>& sets);

// The experiment-protocol sampler: uniform subset of size
// max(1, round(v |support|)), returned sorted. Not a partition sampler and
// not unbiased for v < 1. Consumes no randomness when the subset is the
// whole support.
std::vector<std::uint32_t> fraction_filter(
    std::span<const std::uint32_t> support, double v, std::mt19937_64& rng);

}  // namespace asgd
