#include <doctest.h>

#include "asgd/rng.hpp"

using namespace asgd;

TEST_CASE("splitmix64 is deterministic and advances its state") {
  std::uint64_t s1 = 42, s2 = 42;
  CHECK(splitmix64(s1) == splitmix64(s2));
  CHECK(s1 == s2);
  CHECK(splitmix64(s1) != splitmix64(s2) + 1);  // sequence continues equally
}

TEST_CASE("RngBundle streams are reproducible per (seed, worker)") {
  RngBundle a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.example() == b.example());
    CHECK(a.filter() == b.filter());
    CHECK(a.mask() == b.mask());
  }
}

TEST_CASE("different workers get different streams") {
  RngBundle a(7, 0), b(7, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i)
    if (a.example() == b.example()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("the three streams of one bundle are distinct") {
  RngBundle a(123);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t e = a.example(), f = a.filter(), m = a.mask();
    if (e == f || f == m || e == m) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform_index stays in range and covers all values") {
  std::mt19937_64 g(1);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 10000; ++i) {
    std::size_t j = uniform_index(g, 10);
    REQUIRE(j < 10);
    ++hits[j];
  }
  for (int h : hits) CHECK(h > 800);  // ~1000 expected, 4+ sigma slack
}
