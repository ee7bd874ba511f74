#include "asgd/partition.hpp"

#include <algorithm>

#include "asgd/rng.hpp"

namespace asgd {

FilterPartition build_partition(std::vector<std::uint32_t> sorted_support,
                                int D) {
  if (sorted_support.empty())
    throw std::invalid_argument("empty gradient support");
  if (D < 1) throw std::invalid_argument("D must be positive");
  FilterPartition p;
  p.support = std::move(sorted_support);
  p.D = D;
  std::size_t m = p.support.size();
  p.d = static_cast<int>(std::min<std::size_t>(D, m));
  std::size_t base = m / p.d;
  std::size_t extra = m % p.d;  // first `extra` sets get one more (long first)
  std::size_t pos = 0;
  for (int u = 0; u < p.d; ++u) {
    std::size_t len = base + (static_cast<std::size_t>(u) < extra ? 1 : 0);
    p.slices.emplace_back(pos, pos + len);
    pos += len;
  }
  return p;
}

FilterDraw sample_filter(const FilterPartition& p, std::mt19937_64& rng) {
  int u = p.d == 1 ? 0 : static_cast<int>(uniform_index(rng, p.d));
  return {u, p.slices[u].first, p.slices[u].second, p.d};
}

bool verify_unbiased(const FilterPartition& p) {
  std::vector<std::vector<std::uint32_t>> sets;
  for (int u = 0; u < p.d; ++u) {
    auto s = p.set(u);
    sets.emplace_back(s.begin(), s.end());
  }
  return verify_unbiased(p.support, sets);
}

bool verify_unbiased(std::span<const std::uint32_t> support,
                     const std::vector<std::vector<std::uint32_t>>& sets) {
  // d * (1/d) * sum_u indicator(sets[u]) == indicator(support): every
  // support coordinate must appear in exactly one set and nothing else.
  std::vector<std::uint32_t> seen;
  for (const auto& s : sets) {
    if (s.empty()) return false;
    seen.insert(seen.end(), s.begin(), s.end());
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    return false;  // overlap
  std::vector<std::uint32_t> sup(support.begin(), support.end());
  std::sort(sup.begin(), sup.end());
  return seen == sup;
}

std::vector<std::uint32_t> fraction_filter(
    std::span<const std::uint32_t> support, double v, std::mt19937_64& rng) {
  if (!(v > 0.0 && v <= 1.0))
    throw std::invalid_argument("fraction v must be in (0, 1]");
  if (support.empty()) return {};
  std::size_t m = support.size();
  auto size = static_cast<std::size_t>(std::floor(v * m + 0.5));
  size = std::max<std::size_t>(1, std::min(size, m));
  if (size == m) return {support.begin(), support.end()};
  std::vector<std::uint32_t> pool(support.begin(), support.end());
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t j = i + uniform_index(rng, m - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace asgd
