#pragma once

#include <cstdint>
#include <random>

namespace asgd {

// splitmix64; used only to derive stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One generator per kind of random decision (example draw, filter draw,
// mask draw). Engine variants that skip a decision leave the other streams
// untouched, which is what makes trajectory-equality tests exact.
struct RngBundle {
  std::mt19937_64 example;
  std::mt19937_64 filter;
  std::mt19937_64 mask;

  explicit RngBundle(std::uint64_t master, std::uint64_t worker = 0) {
    std::uint64_t s = master + 0x9e3779b97f4a7c15ULL * (worker + 1);
    example.seed(splitmix64(s));
    filter.seed(splitmix64(s));
    mask.seed(splitmix64(s));
  }
};

inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(g);
}

}  // namespace asgd
